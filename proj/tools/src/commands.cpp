#include "pgap/davies.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/purified.hpp"
#include "pgap_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace pgap::cli {

using nlohmann::json;

namespace {

struct Emitter {
  const RunConfig& c;
  CommandOutput out;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit Emitter(const RunConfig& cfg) : c(cfg) {}

  void row(const std::string& quantity, double value, const std::string& method, const std::string& partition = "") {
    ResultRow r;
    r.model = model_label(c.model);
    r.n = c.model.n;
    r.beta = c.beta;
    r.quantity = quantity;
    r.partition = partition;
    r.value = value;
    r.method = method;
    r.seed = c.model.builtin == "random" ? c.model.seed : c.solver.seed;
    if (c.record_timing)
      r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.rows.push_back(r);
  }

  void log(const std::string& line) { out.log.push_back(line); }
};

std::string num(double v) { return format_number(v); }

GapOptions gap_options(const SolverOptions& s) {
  GapOptions o;
  o.tol = s.tol;
  o.dense_max = s.dense_max;
  o.force_iterative = s.force_iterative;
  o.seed = s.seed;
  return o;
}

Sites region_or_all(const std::string& text, const Lattice& lat) {
  Sites x = parse_sites(text, lat);
  if (text.empty()) x = all_sites(lat.site_count());
  if (x.empty()) throw UsageError("region is empty");
  return x;
}

json certificate_json(const Certificate& c) {
  json trace = json::array();
  for (const RecursionRow& r : c.trace)
    trace.push_back(json{{"k", r.k}, {"ell", r.ell}, {"delta", r.delta}, {"s", r.s}, {"factor", r.factor}});
  return json{{"family", c.family},
              {"parameters", c.parameters},
              {"trace", trace},
              {"prefactor", c.prefactor},
              {"log_prefactor", c.log_prefactor},
              {"product_power", c.product_power},
              {"eta_term", c.eta_term},
              {"product_truncation_error", c.product_truncation_error},
              {"log_space", c.log_space},
              {"lower_bound", c.lower_bound},
              {"log_value", c.log_value},
              {"branch", c.branch},
              {"printed_form", c.printed_form},
              {"readings", c.readings}};
}

void emit_certificate(Emitter& e, const Certificate& cert, const std::string& method) {
  e.row("certificate", cert.lower_bound, method);
  e.row("certificate_log", cert.log_value, method);
  e.log(method + ": " + cert.printed_form + " = " + num(cert.lower_bound) + " (log " + num(cert.log_value) +
        (cert.branch.empty() ? "" : ", branch " + cert.branch) + ")");
  e.out.extra["certificates"].push_back(certificate_json(cert));
}

}  // namespace

CommandOutput run_model(const RunConfig& c) {
  Emitter e(c);
  const Interaction phi = build_model(c.model);
  e.row("site_count", phi.lattice.site_count(), "builtin");
  e.row("terms", static_cast<double>(phi.terms.size()), "builtin");
  e.row("range", phi.range(), "builtin");
  e.row("strength", phi.strength(), "builtin");
  e.row("max_commutator", phi.max_commutator(), "builtin");
  e.log("model " + phi.name + " on " + phi.lattice.describe() + (phi.commuting ? ", commuting" : ""));
  e.out.extra["model"] = model_to_json(phi);
  return e.out;
}

CommandOutput run_delta(const RunConfig& c) {
  Emitter e(c);
  if (c.partition.empty()) throw UsageError("delta needs --partition");
  const Interaction phi = build_model(c.model);
  const Partition p = parse_partition(c.partition, phi.lattice);
  const DensityMatrix sigma = gibbs_state(phi, c.beta);
  const std::string ps = p.format();
  const std::string method = c.method.empty() ? "direct" : c.method;
  const bool all = method == "all";
  if (!all && method != "direct" && method != "constrained" && method != "martingale" && method != "bounds")
    throw UsageError("unknown delta method '" + method + "'");
  DeltaOptions opts;
  opts.seed = c.solver.seed;
  if (all || method == "direct") {
    try {
      const MixingReport r = delta_direct(sigma, p, opts);
      e.row("delta", r.delta, "direct", ps);
      e.log("direct: delta = " + num(r.delta) + ", residual " + num(r.residual));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::capacity) throw;
      e.log(std::string("direct route over capacity (") + err.what() + "), using the martingale defect");
      e.row("delta", martingale_defect(sigma, p.a, p.b, p.c, c.solver.seed), "martingale", ps);
    }
  }
  if (all || method == "constrained") e.row("delta", delta_constrained(sigma, p, opts), "constrained", ps);
  if (all || method == "martingale") {
    if (!p.d.empty())
      e.log("martingale defect equals delta only for D empty; reported as is");
    e.row("delta", martingale_defect(sigma, p.a, p.b, p.c, c.solver.seed), "martingale", ps);
  }
  if (all || method == "bounds") {
    const DeltaBounds b = delta_upper_bounds(sigma, p);
    e.row("delta_upper", b.half_sum_upper, "half_sum", ps);
    if (b.d_empty_upper) e.row("delta_upper", *b.d_empty_upper, "d_empty", ps);
    if (b.commuting_upper) e.row("delta_upper", *b.commuting_upper, "commuting", ps);
    e.row("delta_lower", b.corr_lower, "corr_lower", ps);
    e.row("marginal_commutator", b.marginal_commutator, "bounds", ps);
  }
  return e.out;
}

CommandOutput run_gap(const RunConfig& c) {
  Emitter e(c);
  const Interaction phi = build_model(c.model);
  const Sites x = region_or_all(c.region, phi.lattice);
  const DensityMatrix sigma = gibbs_state(phi, c.beta);
  const GapResult r = spectral_gap(purified_hamiltonian(sigma, x), gap_options(c.solver));
  e.row("gap", r.gap, r.method, format_sites(x, phi.lattice));
  e.log("gap = " + num(r.gap) + " method " + r.method + " kernel_dim " + std::to_string(r.kernel_dim) + " residual " +
        num(r.residual) + " matvecs " + std::to_string(r.matvecs) + (r.kernel_ambiguous ? " (kernel ambiguous)" : ""));
  e.out.extra["gap"] = json{{"kernel_dim", r.kernel_dim}, {"residual", r.residual}, {"norm", r.norm},
                            {"matvecs", r.matvecs}, {"kernel_ambiguous", r.kernel_ambiguous}};
  return e.out;
}

CommandOutput run_eta(const RunConfig& c) {
  Emitter e(c);
  const Interaction phi = build_model(c.model);
  const Sites x = parse_sites(c.region.empty() ? "0" : c.region, phi.lattice);
  if (x.empty()) throw UsageError("eta needs a nonempty --region");
  const std::string method = c.method.empty() ? "all" : c.method;
  const bool all = method == "all";
  if (!all && method != "trivial" && method != "gibbs-boundary" && method != "closed-form" && method != "heuristic")
    throw UsageError("unknown eta method '" + method + "'");
  const std::string xs = format_sites(x, phi.lattice);
  auto emit = [&](const EtaBound& b) {
    e.row("eta", b.value, eta_method_name(b.method), xs);
    e.row("eta_gap_bound", small_region_gap_bound(b), eta_method_name(b.method), xs);
  };
  if (method == "closed-form") {
    emit(eta_closed_form(phi, c.beta, x));
    return e.out;
  }
  const DensityMatrix sigma = gibbs_state(phi, c.beta);
  std::optional<EtaBound> best;
  auto keep = [&](const EtaBound& b) {
    if (!best || b.value < best->value) best = b;
  };
  if (all || method == "trivial") {
    const EtaBound b = eta_trivial(sigma);
    emit(b);
    keep(b);
  }
  if (all || method == "gibbs-boundary" || method == "heuristic") {
    const EtaBound b = eta_gibbs_boundary(sigma, phi, c.beta, x);
    if (method != "heuristic") emit(b);
    keep(b);
  }
  if (all) emit(eta_closed_form(phi, c.beta, x));
  if (all || method == "heuristic") {
    const int iters = c.eta_iterations > 0 ? c.eta_iterations : 60;
    emit(eta_refine(sigma, x, *best, iters, c.solver.seed));
    e.log("heuristic eta is a local search result and only an upper bound");
  }
  return e.out;
}

CommandOutput run_davies(const RunConfig& c) {
  Emitter e(c);
  const Interaction phi = build_model(c.model);
  const DensityMatrix sigma = gibbs_state(phi, c.beta);
  const DaviesGenerator g = build_davies(phi, c.beta, {}, rate_profile_from_name(c.profile));
  const std::string prof = rate_profile_name(g.profile);
  e.row("db_defect", db_defect(g.dissipator, sigma), prof);
  const DissipatorGaps gaps = dissipator_gaps(g, sigma);
  e.row("site_gap_min", gaps.min_site_gap, prof);
  e.row("davies_gap", gaps.global_gap, prof);
  e.row("gap", gaps.purified_gap, "purified");
  e.row("davies_margin", gaps.margin, prof);
  e.log("jumps " + std::to_string(g.jumps.size()) + ", gap(D) = " + num(gaps.global_gap) + ", min_x gap(D_x) = " +
        num(gaps.min_site_gap) + ", gap(H) = " + num(gaps.purified_gap));
  if (!c.times.empty()) {
    const long long dim = sigma.dim();
    Mat rho0 = Mat::Zero(dim, dim);
    rho0(0, 0) = 1.0;
    for (const TrajectoryPoint& p : evolve(g, sigma, rho0, c.times, gaps.global_gap)) {
      const std::string at = "t=" + num(p.t);
      e.row("decay_point", p.distance, prof, at);
      e.row("decay_bound", p.bound, prof, at);
    }
  }
  return e.out;
}

CommandOutput run_certify(const RunConfig& c) {
  Emitter e(c);
  const std::string family = c.family.empty() ? "ising" : c.family;
  const long long n = c.model.n;
  if (family == "ising") {
    emit_certificate(e, ising_gap_corollary(c.beta), "ising_gap_corollary");
    // single-block bound from the closed form: every site of the ring touches two unit bonds
    const double eta = c.eta > 0 ? c.eta : std::exp(c.beta * static_cast<double>(c.mu) * 2.0);
    emit_certificate(e, certificate_1d(ising_envelope(c.beta), eta, n, c.mu), "certificate_1d");
  } else if (family == "qd-abelian") {
    emit_certificate(e, qd_abelian_gap_corollary(c.beta, c.group_order), "qd_abelian_gap_corollary");
    if (c.eta > 0 && c.mu >= 256 && n >= c.mu)
      emit_certificate(e, certificate_2d(qd_abelian_envelope(c.beta, c.group_order), c.eta, n, c.mu),
                       "certificate_2d");
  } else if (family == "qd-general") {
    emit_certificate(e, qd_general_gap_corollary(c.beta, c.group_order), "qd_general_gap_corollary");
  } else {
    throw UsageError("unknown certificate family '" + family + "' (ising, qd-abelian, qd-general)");
  }
  return e.out;
}

CommandOutput run_single(const RunConfig& c) {
  if (c.command == "model") return run_model(c);
  if (c.command == "delta") return run_delta(c);
  if (c.command == "gap") return run_gap(c);
  if (c.command == "eta") return run_eta(c);
  if (c.command == "davies") return run_davies(c);
  if (c.command == "certify") return run_certify(c);
  throw UsageError("'" + c.command + "' is not a single-evaluation command");
}

}  // namespace pgap::cli
