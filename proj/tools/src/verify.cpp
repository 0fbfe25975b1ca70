#include "pgap/davies.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/purified.hpp"
#include "pgap/rng.hpp"
#include "pgap_cli/cli.hpp"
#include "pgap_cli/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace pgap::cli {

using nlohmann::json;

namespace {

// Collects inequalities measured <= tol; the reported one is the worst relative to its tolerance.
struct Worst {
  bool ok = true;
  double value = 0.0;
  double tol = 0.0;
  double ratio = -std::numeric_limits<double>::infinity();
  std::string where;
  void update(double v, double t, const std::string& at) {
    const bool pass = v <= t;
    ok = ok && pass;
    double q = t > 0 ? v / t : (pass ? (v < 0 ? -1.0 : 0.0) : std::numeric_limits<double>::infinity());
    if (std::isnan(v)) q = std::numeric_limits<double>::infinity();
    if (where.empty() || q > ratio) {
      ratio = q;
      value = v;
      tol = t;
      where = at;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CheckResult timed(int id, const std::string& suite, const std::string& name, double budget_s,
                  const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.id = id;
  r.suite = suite;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && r.seconds > budget_s) {
    r.passed = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("runtime ") + fmt(r.seconds) + " s over budget " +
                fmt(budget_s) + " s";
  }
  return r;
}

void settle(CheckResult& r, const Worst& w) {
  r.measured = w.value;
  r.threshold = w.tol;
  r.passed = w.ok;
  r.detail = "worst at " + w.where;
}

std::vector<Sites> cyclic_intervals(int n) {
  std::vector<Sites> out;
  for (int len = 1; len < n; ++len)
    for (int s = 0; s < n; ++s) out.push_back(cyclic_interval(n, s, len));
  out.push_back(all_sites(n));
  return out;
}

std::string sites_str(const Sites& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

double gap_of(const DensityMatrix& sigma, const Sites& x, GapOptions opts = {}) {
  return spectral_gap(purified_hamiltonian(sigma, x), opts).gap;
}

// ---------------------------------------------------------------- criteria

CheckResult c1_projectors() {
  return timed(1, "gap", "pi_project matches the Gram projector on 4 qubits", 60, [](CheckResult& r) {
    Worst w;
    CounterRng rng(101);
    const int n = 4;
    for (int trial = 0; trial < 20; ++trial) {
      CounterRng sub = rng.substream(trial);
      const DensityMatrix sigma(random_density(sub, 16, 1.5), n, 2);
      const PurifiedContext ctx(sigma);
      for (const Sites& x : cyclic_intervals(n)) {
        const SuperOperator p = ctx.projector(x);
        const Mat dense = p.materialize();
        const Mat ref = oracle::gram_projector(sigma.matrix(), complement(x, n), n, 2);
        const std::string at = "trial " + std::to_string(trial) + " X=" + sites_str(x);
        w.update(oracle::rel_err(dense, ref), 1e-10, at + " (projector)");
        const Mat q = random_complex(sub, 16, 16);
        const Mat b = random_complex(sub, 16, 16);
        const Mat pq = p.apply(q);
        w.update((p.apply(pq) - pq).norm() / q.norm(), 1e-10, at + " (idempotence)");
        const double sa = std::abs(hs_inner(pq, b) - hs_inner(q, p.apply(b))) / (q.norm() * b.norm());
        w.update(sa, 1e-10, at + " (self-adjointness)");
      }
    }
    settle(r, w);
  });
}

std::vector<Partition> five_site_partitions() {
  return {Partition{{0}, {1}, {2}, {3, 4}}, Partition{{0}, {3, 4}, {2}, {1}}, Partition{{0}, {1, 3, 4}, {2}, {}},
          Partition{{0}, {1}, {3}, {2, 4}}, Partition{{0, 1}, {2}, {3}, {4}}, Partition{{0}, {2}, {4}, {1, 3}},
          Partition{{1}, {2}, {3}, {0, 4}}};
}

CheckResult c2_martingale_equality() {
  return timed(2, "mixing", "martingale defect equals delta (direct and constrained routes)", 300, [](CheckResult& r) {
    Worst w;
    int count = 0;
    const std::vector<std::pair<std::string, Interaction>> models{{"ising", ising_ring(5)},
                                                                  {"random", random_ring(5, 2, 1.0, 7)}};
    for (const auto& [name, phi] : models) {
      const DensityMatrix sigma = gibbs_state(phi, 1.0);
      for (const Partition& p : five_site_partitions()) {
        const double direct = delta_direct(sigma, p).delta;
        const double mart = martingale_defect(sigma, p.a, p.b, p.c);
        const double cons = delta_constrained(sigma, p);
        w.update(std::abs(mart - direct), 1e-8, name + " " + p.format() + " (martingale)");
        w.update(std::abs(direct - cons), 1e-8, name + " " + p.format() + " (constrained)");
        ++count;
      }
    }
    settle(r, w);
    r.detail += ", " + std::to_string(count) + " partitions";
  });
}

CheckResult c3_degenerate() {
  return timed(3, "mixing", "product and maximally mixed anchors", 0, [](CheckResult& r) {
    Worst w;
    CounterRng rng(103);
    Mat prod = identity(1);
    for (int k = 0; k < 4; ++k) prod = kron(prod, random_density(rng, 2));
    const std::vector<std::pair<std::string, DensityMatrix>> states{
        {"product", DensityMatrix(prod, 4, 2)}, {"flat", DensityMatrix(identity(16) / 16.0, 4, 2)}};
    const std::vector<Partition> parts{Partition{{0}, {1}, {2}, {3}}, Partition{{0}, {1, 3}, {2}, {}},
                                       Partition{{0, 1}, {}, {2}, {3}}, Partition{{3}, {0}, {1}, {2}}};
    for (const auto& [name, s] : states)
      for (const Partition& p : parts) w.update(delta_direct(s, p).delta, 1e-8, name + " " + p.format());
    for (int n = 2; n <= 4; ++n) {
      const long long dim = ipow(2, n);
      const DensityMatrix flat(identity(dim) / static_cast<double>(dim), n, 2);
      w.update(std::abs(gap_of(flat, all_sites(n)) - 1.0), 1e-10, "flat gap N=" + std::to_string(n));
    }
    settle(r, w);
  });
}

CheckResult c4_ising_closed_forms() {
  return timed(4, "marginals", "Ising partition function and marginals vs brute force", 120, [](CheckResult& r) {
    Worst w;
    for (int n = 2; n <= 8; ++n) {
      for (double beta : {0.3, 1.0, 2.0}) {
        const double zb = oracle::ising_partition_brute(n, beta);
        const std::string tag = "N=" + std::to_string(n) + " beta=" + fmt(beta);
        w.update(std::abs(ising_partition_function(n, beta) - zb) / zb, 1e-12, tag + " Z");
        const Mat weight = oracle::ising_gibbs_brute(n, beta) * zb;
        const Sites all = all_sites(n);
        for (int len = 1; len < n; ++len)
          for (int s = 0; s < n; ++s) {
            const Sites keep = cyclic_interval(n, s, len);
            const Mat ref = oracle::partial_trace(weight, all, complement(keep, n), 2);
            const Operator m = ising_marginal_closed(n, beta, s, len);
            w.update(oracle::rel_err(m.m, ref), 1e-12, tag + " I=" + sites_str(keep));
          }
      }
    }
    const double z41 = ising_partition_function(4, 1.0);
    w.update(std::abs(z41 - 121.2329), 1e-4, "Z(4,1) vs 121.2329");
    settle(r, w);
  });
}

CheckResult c5_ising_envelope() {
  return timed(5, "mixing", "Ising delta below the tanh envelope on the 8-ring", 0, [](CheckResult& r) {
    Worst w;
    for (double beta : {0.5, 1.0}) {
      const DensityMatrix sigma = gibbs_state(ising_ring(8), beta);
      for (int ell = 1; ell <= 3; ++ell)
        for (ShieldD which : {ShieldD::empty, ShieldD::i1, ShieldD::i2}) {
          const Partition p = ring_shield_partition(8, 0, 1, ell, 1, which);
          const int l = shielding_length(8, p);
          const double t = std::pow(std::tanh(beta), l);
          const double env = 4 * t / ((1 + t) * (1 + t));
          const double d = delta_direct(sigma, p).delta;
          w.update(d - env, 1e-8, "beta=" + fmt(beta) + " " + p.format());
        }
    }
    settle(r, w);
  });
}

CheckResult c6_eta_bounds() {
  return timed(6, "gap", "gap(H_X) >= eta^-4 for every eta method", 0, [](CheckResult& r) {
    Worst w;
    const std::vector<std::pair<std::string, Interaction>> models{
        {"ising4", ising_ring(4)}, {"ising5", ising_ring(5)}, {"random5", random_ring(5, 2, 1.0, 11)}};
    for (const auto& [name, phi] : models) {
      const double beta = 1.0;
      const DensityMatrix sigma = gibbs_state(phi, beta);
      for (const Sites& x : {Sites{0}, Sites{0, 1}, Sites{0, 1, 2}}) {
        const double g = gap_of(sigma, x);
        const EtaBound gb = eta_gibbs_boundary(sigma, phi, beta, x);
        const std::vector<EtaBound> bounds{eta_trivial(sigma), gb, eta_closed_form(phi, beta, x),
                                           eta_refine(sigma, x, gb, 20, 5)};
        for (const EtaBound& b : bounds)
          w.update(small_region_gap_bound(b) - g, 1e-8, name + " X=" + sites_str(x) + " " + eta_method_name(b.method));
      }
    }
    settle(r, w);
  });
}

CheckResult c7_splitting() {
  return timed(7, "gap", "two-region splitting inequality on the 6-ring", 0, [](CheckResult& r) {
    Worst w;
    GapOptions it;
    it.dense_max = 1024;  // D^2 = 4096 goes through the iterative solver
    struct Split {
      Sites l, rr;
    };
    const std::vector<Split> splits{{{0, 1, 2, 3}, {2, 3, 4, 5}},
                                    {{0, 1, 2}, {2, 3, 4}},
                                    {{0, 1, 2}, {1, 2, 3}},
                                    {{0, 1, 2, 3, 4}, {3, 4, 5}},
                                    {{5, 0, 1}, {1, 2, 3}}};
    const std::vector<std::pair<std::string, Interaction>> models{{"ising", ising_ring(6)},
                                                                  {"random", random_ring(6, 2, 1.0, 13)}};
    for (const auto& [name, phi] : models) {
      const DensityMatrix sigma = gibbs_state(phi, 1.0);
      for (Split s : splits) {
        s.l = normalize_region(s.l);
        s.rr = normalize_region(s.rr);
        const Sites b = region_intersection(s.l, s.rr);
        const Sites a = region_minus(s.l, b);
        const Sites c = region_minus(s.rr, b);
        const double delta = martingale_defect(sigma, a, b, c);
        const double gl = gap_of(sigma, s.l, it);
        const double gr = gap_of(sigma, s.rr, it);
        const double glr = gap_of(sigma, region_union(s.l, s.rr), it);
        const double rhs = (1.0 - delta) / 2.0 * std::min(gl, gr);
        w.update(rhs - glr, 1e-8, name + " L=" + sites_str(s.l) + " R=" + sites_str(s.rr));
      }
    }
    settle(r, w);
  });
}

// brute-force Tr_R of prod e^{beta A_s} prod e^{beta B_p} over the stars and plaquettes touching R,
// on all edges minus R
Mat qd_brute_trace(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region) {
  const Sites all = all_sites(lat.site_count());
  Mat sum = Mat::Zero(ipow(g.order, lat.site_count()), ipow(g.order, lat.site_count()));
  for (int v : stars_touching(lat, region)) {
    const Operator s = star_operator(lat, g, v, std::nullopt);
    sum += oracle::embed(s.m, s.support, all, g.order);
  }
  for (int f : plaquettes_touching(lat, region)) {
    const Operator p = plaquette_operator(lat, g, f, kDeltaIdentity);
    sum += oracle::embed(p.m, p.support, all, g.order);
  }
  const Mat w = oracle::herm_fn(sum, [beta](double e) { return std::exp(beta * e); });
  return oracle::partial_trace(w, all, region, g.order);
}

CheckResult c8_quantum_double() {
  return timed(8, "marginals", "quantum double marginals on the 2x2 torus (Z2)", 600, [](CheckResult& r) {
    Worst w;
    const GroupSpec z2 = cyclic_group(2);
    const Lattice lat = Lattice::torus(2, 2);
    const int edges = lat.site_count();
    int regions = 0, sandwiches = 0;
    for (int mask = 1; mask < (1 << edges); ++mask) {
      Sites reg;
      for (int e = 0; e < edges; ++e)
        if (mask >> (edges - 1 - e) & 1) reg.push_back(e);
      std::sort(reg.begin(), reg.end());
      const Connectivity con = connectivity_check(lat, reg);
      if (!con.by_stars || !con.by_plaquettes) continue;
      if (qd_closure(lat, reg).size() > 14) continue;
      if (reg.size() == static_cast<size_t>(edges)) continue;  // nothing left to act on
      ++regions;
      for (double beta : {0.3, 1.0}) {
        const std::string at = "R=" + sites_str(reg) + " beta=" + fmt(beta);
        const QdMarginalForm f = qd_marginal_closed(lat, z2, beta, reg);
        const Sites rest = complement(reg, edges);
        const Mat closed = oracle::embed(f.materialized, f.outer, rest, 2);
        w.update(oracle::rel_err(closed, qd_brute_trace(lat, z2, beta, reg)), 1e-10, at + " (brute force)");
        w.update(oracle::rel_err(qd_boundary_trace(lat, z2, beta, reg), f.materialized), 1e-10, at + " (general path)");
        if (reg.size() <= 2) {
          const QdSandwich s = qd_trace_sandwich(lat, z2, beta, reg, true);
          ++sandwiches;
          w.update(s.lower - s.spectrum_min, 1e-10 * s.kappa, at + " (sandwich lower)");
          w.update(s.spectrum_max - s.upper, 1e-10 * s.kappa, at + " (sandwich upper)");
        }
      }
    }
    settle(r, w);
    r.detail += ", " + std::to_string(regions) + " regions, " + std::to_string(sandwiches) + " sandwich checks";
  });
}

CheckResult c9_davies() {
  return timed(9, "davies", "Davies generator suite on Ising N=3,4", 600, [](CheckResult& r) {
    Worst w;
    CounterRng rng(109);
    for (int n : {3, 4}) {
      for (double beta : {0.5, 1.0}) {
        const std::string tag = "N=" + std::to_string(n) + " beta=" + fmt(beta);
        const Interaction phi = ising_ring(n);
        const DensityMatrix sigma = gibbs_state(phi, beta);
        const long long dim = sigma.dim();
        const DaviesGenerator g = build_davies(phi, beta);
        w.update(db_defect(g.dissipator, sigma), 1e-10, tag + " db_defect");
        for (const Mat& dx : g.site_dissipators) w.update(db_defect(dx, sigma), 1e-10, tag + " site db_defect");
        w.update(op_norm(unvec(g.generator_dual() * vec(sigma.matrix()), dim)), 1e-9, tag + " L*(sigma)");
        for (const Jump& j : g.jumps) {
          const std::string jt = tag + " jump site " + std::to_string(j.site) + " omega " + fmt(j.omega);
          for (int k = 0; k < 3; ++k) {
            const Mat q = random_complex(rng, dim, dim);
            const double val = gns_inner(sigma, q, unvec(j.dissipator * vec(q), dim)).real() / q.squaredNorm();
            w.update(val, 1e-10, jt + " GNS negativity");
          }
          std::vector<Mat> vs{j.v, j.v.adjoint()};
          if (j.v_partner.size()) {
            vs.push_back(j.v_partner);
            vs.push_back(j.v_partner.adjoint());
          }
          const double mismatch = std::abs(static_cast<double>(kernel_dimension(j.dissipator) - commutant_dimension(vs)));
          w.update(mismatch, 0.0, jt + " kernel vs commutant dimension");
        }
        const DissipatorGaps gaps = dissipator_gaps(g, sigma);
        w.update(gaps.min_site_gap * gaps.purified_gap - gaps.global_gap, 1e-8, tag + " gap comparison");
        Mat rho0 = Mat::Zero(dim, dim);
        rho0(0, 0) = 1.0;
        std::vector<double> times;
        for (int k = 0; k < 12; ++k) times.push_back(0.5 * k / gaps.global_gap);
        for (const TrajectoryPoint& p : evolve(g, sigma, rho0, times, gaps.global_gap))
          w.update(p.distance - p.bound, 1e-8, tag + " decay t=" + fmt(p.t));
      }
    }
    settle(r, w);
  });
}

CheckResult c10_certificates() {
  return timed(10, "certify", "certificates below measured gaps (Ising N=8, QD Z2 N=2)", 1200, [](CheckResult& r) {
    Worst w;
    double worst_residual = 0.0;
    GapOptions opts;
    opts.tol = 1e-10;
    for (double beta : {0.0, 0.5, 1.0}) {
      const std::string tag = "ising N=8 beta=" + fmt(beta);
      const DensityMatrix sigma = gibbs_state(ising_ring(8), beta);
      const GapResult g = spectral_gap(purified_hamiltonian(sigma, all_sites(8)), opts);
      worst_residual = std::max(worst_residual, g.residual);
      const long long mu = 9;
      const Certificate c1 = certificate_1d(ising_envelope(beta), std::exp(beta * mu * 2.0), 8, mu);
      w.update(c1.lower_bound - g.gap, 1e-8, tag + " certificate_1d");
      w.update(ising_gap_corollary(beta).lower_bound - g.gap, 1e-8, tag + " corollary");
    }
    {
      const double beta = 0.3;
      const DensityMatrix sigma = gibbs_state(quantum_double(2, cyclic_group(2)), beta);
      const GapResult g = spectral_gap(purified_hamiltonian(sigma, all_sites(8)), opts);
      worst_residual = std::max(worst_residual, g.residual);
      const Certificate c = qd_abelian_gap_corollary(beta, 2);
      // the bound underflows, so compare logarithms
      w.update(c.log_value - std::log(g.gap + 1e-8), 0.0, "qd Z2 N=2 beta=0.3 log bound (" + g.method + ")");
    }
    w.update(worst_residual, 1e-8, "solver residual");
    settle(r, w);
    r.detail += ", worst residual " + fmt(worst_residual);
  });
}

CheckResult c11_general_decay() {
  return timed(11, "mixing", "random 8-ring: delta(3) < delta(1) at beta=1", 0, [](CheckResult& r) {
    r.measured = -std::numeric_limits<double>::infinity();
    r.threshold = 0.0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const DensityMatrix sigma = gibbs_state(random_ring(8, 2, 1.0, seed), 1.0);
      const double d1 = delta_direct(sigma, ring_shield_partition(8, 0, 1, 1, 1, ShieldD::empty)).delta;
      const double d3 = delta_direct(sigma, ring_shield_partition(8, 0, 1, 3, 1, ShieldD::empty)).delta;
      r.detail += (r.detail.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + ": " + fmt(d1) +
                  " -> " + fmt(d3);
      r.measured = std::max(r.measured, d3 - d1);
    }
    r.passed = r.measured < 0.0;
  });
}

CheckResult c12_determinism() {
  return timed(12, "certify", "sweep output identical for jobs=1 and jobs=4", 0, [](CheckResult& r) {
    Worst w;
    std::vector<RunConfig> cfgs;
    RunConfig cert;
    cert.task = "certify";
    cert.family = "ising";
    cert.mu = 9;
    cert.model.n = 1000;
    cert.grid = "beta=0.1:2.0:0.1";
    cfgs.push_back(cert);
    RunConfig gap;
    gap.task = "gap";
    gap.model.n = 3;
    gap.grid = "beta=0.1:2.0:0.1";
    cfgs.push_back(gap);
    RunConfig delta;
    delta.task = "delta";
    delta.model.builtin = "random";
    delta.model.n = 4;
    delta.partition = "A=0;B=1;C=2;D=3";
    delta.method = "all";
    delta.grid = "seed=1,2,3,4,5,6";
    cfgs.push_back(delta);
    for (RunConfig c : cfgs) {
      c.command = "sweep";
      c.jobs = 1;
      const std::string one = to_csv(run_sweep(c).rows);
      c.jobs = 4;
      const std::string four = to_csv(run_sweep(c).rows);
      const long long lines = std::count(one.begin(), one.end(), '\n');
      w.update(one == four ? 0.0 : 1.0, 0.0, c.task + " (" + std::to_string(lines) + " lines)");
    }
    settle(r, w);
  });
}

// ---------------------------------------------------------------- invariants

CheckResult inv_algebra() {
  return timed(0, "algebra", "embedding, partial trace and bases vs index-loop references", 0, [](CheckResult& r) {
    Worst w;
    CounterRng rng(201);
    const Sites all{0, 1, 2, 3};
    for (const Sites& s : {Sites{1}, Sites{0, 2}, Sites{1, 3}, Sites{0, 1, 3}}) {
      const long long dim = ipow(2, static_cast<int>(s.size()));
      const Mat m = random_complex(rng, dim, dim);
      w.update(oracle::rel_err(embed(m, s, all, 2), oracle::embed(m, s, all, 2)), 1e-12, "embed " + sites_str(s));
      const Mat big = random_complex(rng, 16, 16);
      w.update(oracle::rel_err(partial_trace(big, all, s, 2), oracle::partial_trace(big, all, s, 2)), 1e-12,
               "partial trace " + sites_str(s));
    }
    for (int d : {2, 3}) {
      const auto basis = herm_basis(2, d);
      for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) {
          const double target = i == j ? 1.0 : 0.0;
          w.update(std::abs(hs_inner(basis[i], basis[j]) - target), 1e-12, "herm basis d=" + std::to_string(d));
        }
    }
    const DensityMatrix sigma(random_density(rng, 16, 1.5), 4, 2);
    w.update(oracle::rel_err(sigma.sqrt() * sigma.sqrt(), sigma.matrix()), 1e-12, "sqrt squared");
    w.update(oracle::rel_err(sigma.inv_sqrt() * sigma.sqrt(), identity(16)), 1e-12, "inverse square root");
    settle(r, w);
  });
}

CheckResult inv_gibbs() {
  return timed(0, "marginals", "Gibbs states are normalized and positive", 0, [](CheckResult& r) {
    Worst w;
    for (double beta : {0.0, 0.7, 2.0}) {
      const DensityMatrix s = gibbs_state(random_ring(5, 2, 1.0, 3), beta);
      w.update(std::abs(s.matrix().trace() - cplx(1.0)), 1e-12, "trace beta=" + fmt(beta));
      w.update(-s.min_eigenvalue(), 1e-12, "positivity beta=" + fmt(beta));
      w.update(max_abs(s.matrix() - s.matrix().adjoint()), 1e-12, "hermiticity beta=" + fmt(beta));
    }
    settle(r, w);
  });
}

CheckResult inv_mixing() {
  return timed(0, "mixing", "delta lies in [0,1] and is symmetric in A and C", 0, [](CheckResult& r) {
    Worst w;
    const DensityMatrix sigma = gibbs_state(random_ring(5, 2, 1.0, 5), 1.0);
    for (const Partition& p : five_site_partitions()) {
      const double d = delta_direct(sigma, p).delta;
      const double ds = delta_direct(sigma, Partition{p.c, p.b, p.a, p.d}).delta;
      w.update(d - 1.0, 1e-8, p.format() + " upper");
      w.update(-d, 1e-8, p.format() + " lower");
      w.update(std::abs(d - ds), 1e-8, p.format() + " symmetry");
    }
    settle(r, w);
  });
}

CheckResult inv_gap() {
  return timed(0, "gap", "purified Hamiltonian is frustration free with ground vector sigma^1/2", 0, [](CheckResult& r) {
    Worst w;
    for (const auto& phi : {ising_ring(4), random_ring(4, 2, 1.0, 9)}) {
      const DensityMatrix sigma = gibbs_state(phi, 1.0);
      const PurifiedContext ctx(sigma);
      for (int x = 0; x < 4; ++x)
        w.update((ctx.project({x}, sigma.sqrt()) - sigma.sqrt()).norm(), 1e-10, phi.name + " Pi_x sigma^1/2");
      const SuperOperator h = purified_hamiltonian(sigma, all_sites(4));
      w.update(h.apply(sigma.sqrt()).norm(), 1e-10, phi.name + " H sigma^1/2");
      const GapResult g = spectral_gap(h);
      w.update(std::abs(static_cast<double>(g.kernel_dim) - 1.0), 1e-10, phi.name + " kernel dimension");
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h.materialize()), Eigen::EigenvaluesOnly);
      w.update(-es.eigenvalues()(0), 1e-10, phi.name + " positivity");
    }
    settle(r, w);
  });
}

CheckResult inv_davies() {
  return timed(0, "davies", "Bohr components reconstruct the coupling", 0, [](CheckResult& r) {
    Worst w;
    const Interaction phi = ising_ring(3);
    const Mat h = phi.hamiltonian();
    for (const Mat& s : default_couplings(2)) {
      const Mat full = embed(s, {1}, all_sites(3), 2);
      w.update(oracle::rel_err(bohr_decompose(h, full).reconstruct(), full), 1e-12, "site 1");
    }
    settle(r, w);
  });
}

CheckResult inv_certify() {
  return timed(0, "certify", "corollary sweep is monotone in beta and traces recompute", 0, [](CheckResult& r) {
    Worst w;
    RunConfig c;
    c.command = "sweep";
    c.task = "certify";
    c.family = "ising";
    c.model.n = 1000;
    c.grid = "beta=0.1:2.0:0.1";
    const SweepOutput s = run_sweep(c);
    double prev = std::numeric_limits<double>::infinity();
    for (const ResultRow& row : s.rows) {
      if (row.quantity != "certificate_log" || row.method != "ising_gap_corollary") continue;
      w.update(row.value - prev, 1e-12, "beta=" + fmt(row.beta));
      prev = row.value;
    }
    for (double beta : {0.2, 1.0}) {
      const Certificate cert = certificate_1d(ising_envelope(beta), std::exp(beta * 18.0), 40, 9);
      w.update(std::abs(cert.recompute() - cert.lower_bound) / cert.lower_bound, 1e-12, "recompute beta=" + fmt(beta));
    }
    settle(r, w);
  });
}

using Factory = CheckResult (*)();

const std::vector<Factory>& criteria() {
  static const std::vector<Factory> list{c1_projectors,    c2_martingale_equality, c3_degenerate,
                                         c4_ising_closed_forms, c5_ising_envelope, c6_eta_bounds,
                                         c7_splitting,     c8_quantum_double,      c9_davies,
                                         c10_certificates, c11_general_decay,      c12_determinism};
  return list;
}

// suite -> invariant checks and criterion numbers
struct SuiteSpec {
  std::string name;
  std::vector<Factory> invariants;
  std::vector<int> criteria;
};

const std::vector<SuiteSpec>& suites() {
  static const std::vector<SuiteSpec> list{
      {"algebra", {inv_algebra}, {}},
      {"marginals", {inv_gibbs}, {4, 8}},
      {"mixing", {inv_mixing}, {2, 3, 5, 11}},
      {"gap", {inv_gap}, {1, 6, 7}},
      {"davies", {inv_davies}, {9}},
      {"certify", {inv_certify}, {10, 12}},
  };
  return list;
}

}  // namespace

json check_to_json(const CheckResult& r) {
  return json{{"id", r.id},           {"suite", r.suite},         {"name", r.name},
              {"passed", r.passed},   {"measured", r.measured},   {"threshold", r.threshold},
              {"detail", r.detail},   {"seconds", r.seconds}};
}

std::string check_line(const CheckResult& r) {
  char head[64];
  if (r.id > 0) std::snprintf(head, sizeof head, "%s [C%02d]", r.passed ? "PASS" : "FAIL", r.id);
  else std::snprintf(head, sizeof head, "%s [%s]", r.passed ? "PASS" : "FAIL", r.suite.c_str());
  return std::string(head) + " " + r.name + ": measured " + fmt(r.measured) + " threshold " + fmt(r.threshold) +
         " (" + fmt(r.seconds) + " s) " + r.detail;
}

std::vector<std::string> verify_suites() {
  std::vector<std::string> out;
  for (const SuiteSpec& s : suites()) out.push_back(s.name);
  out.push_back("all");
  return out;
}

CheckResult acceptance_criterion(int id) {
  if (id < 1 || id > static_cast<int>(criteria().size()))
    throw UsageError("acceptance criteria are numbered 1.." + std::to_string(criteria().size()));
  return criteria()[id - 1]();
}

std::vector<CheckResult> run_verify(const std::string& suite) {
  std::vector<CheckResult> out;
  bool known = false;
  for (const SuiteSpec& s : suites()) {
    if (suite != "all" && suite != s.name) continue;
    known = true;
    for (Factory f : s.invariants) out.push_back(f());
    for (int id : s.criteria) out.push_back(acceptance_criterion(id));
  }
  if (!known) throw UsageError("unknown suite '" + suite + "'");
  if (suite == "all") {
    std::stable_sort(out.begin(), out.end(), [](const CheckResult& a, const CheckResult& b) {
      return (a.id == 0 ? 0 : 1) < (b.id == 0 ? 0 : 1) || ((a.id != 0 && b.id != 0) && a.id < b.id);
    });
  }
  return out;
}

}  // namespace pgap::cli
