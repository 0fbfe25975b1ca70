#include "doctest.h"
#include "pgap_cli/reference.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/models.hpp"

#include <cmath>

using namespace pgap;

namespace {

// Tr_R e^{-beta H_R^boundary} from the interaction terms, on closure \ R
Mat brute_boundary_trace(const Interaction& phi, double beta, const Sites& r) {
  const Sites closure = phi.closure(r);
  const Mat w = oracle::herm_fn(phi.boundary_hamiltonian(r), [beta](double e) { return std::exp(-beta * e); });
  return oracle::partial_trace(w, closure, r, phi.lattice.d);
}

}  // namespace

TEST_SUITE("gibbs") {
  TEST_CASE("ising partition function") {
    CHECK(ising_partition_function(4, 1.0) == doctest::Approx(121.2329).epsilon(1e-6));
    CHECK(ising_partition_function(5, 0.0) == doctest::Approx(32.0));
    const double b = 0.7;
    CHECK(ising_partition_function(2, b) ==
          doctest::Approx(4 * std::pow(std::cosh(b), 2) * (1 + std::pow(std::tanh(b), 2))).epsilon(1e-14));
    for (int n = 2; n <= 8; ++n)
      for (double beta : {0.3, 1.0, 2.0}) {
        const double brute = oracle::ising_partition_brute(n, beta);
        CHECK(std::abs(ising_partition_function(n, beta) - brute) <= 1e-12 * brute);
      }
  }

  TEST_CASE("gibbs state") {
    const Interaction phi = ising_ring(4);
    const DensityMatrix flat = gibbs_state(phi, 0.0);
    CHECK(max_abs(flat.matrix() - identity(16) / 16.0) < 1e-15);
    const DensityMatrix sigma = gibbs_state(phi, 1.0);
    CHECK(std::abs(sigma.matrix().trace() - 1.0) < 1e-12);
    CHECK(op_norm(commutator(sigma.matrix(), phi.hamiltonian())) < 1e-10);
    CHECK(oracle::rel_err(sigma.matrix(), oracle::ising_gibbs_brute(4, 1.0)) < 1e-12);
    // tower property
    const Mat m013 = sigma.marginal({0, 1, 3});
    CHECK(max_abs(partial_trace(m013, {0, 1, 3}, {1}, 2) - sigma.marginal({0, 3})) < 1e-12);
    CHECK_THROWS_AS(gibbs_state(ising_ring(8), 1.0, 64), Error);
  }

  TEST_CASE("ising marginals") {
    for (int n = 2; n <= 8; ++n)
      for (double beta : {0.3, 1.0, 2.0}) {
        const Mat full = ising_partition_function(n, beta) * oracle::ising_gibbs_brute(n, beta);
        const Sites all = all_sites(n);
        for (int start = 0; start < n; ++start)
          for (int len = 1; len < n; ++len) {
            const Operator closed = ising_marginal_closed(n, beta, start, len);
            const Sites traced = complement(closed.support, n);
            const Mat brute = oracle::partial_trace(full, all, traced, 2);
            CHECK(oracle::rel_err(closed.m, brute) <= 1e-12);
          }
      }
    const Operator flat = ising_marginal_closed(6, 0.0, 2, 3);
    CHECK(max_abs(flat.m - 8.0 * identity(8)) < 1e-12);
    CHECK_THROWS_AS(ising_marginal_closed(4, 1.0, 0, 0), Error);
    CHECK_THROWS_AS(ising_marginal_closed(4, 1.0, 0, 4), Error);
  }

  TEST_CASE("connectivity") {
    const Lattice t2 = Lattice::torus(2, 2);
    const Connectivity one = connectivity_check(t2, {3});
    CHECK(one.by_stars);
    CHECK(one.by_plaquettes);
    const Lattice t4 = Lattice::torus(4, 2);
    const Connectivity far = connectivity_check(t4, {t4.edge(0, 0, 0), t4.edge(2, 2, 1)});
    CHECK_FALSE(far.by_stars);
    CHECK_FALSE(far.by_plaquettes);
    Sites row;
    for (int x = 0; x < 4; ++x) {
      row.push_back(t4.edge(x, 1, 0));
      row.push_back(t4.edge(x, 1, 1));
    }
    const Connectivity cyl = connectivity_check(t4, normalize_region(row));
    CHECK(cyl.by_stars);
    CHECK(cyl.by_plaquettes);
  }

  TEST_CASE("quantum double closed-form marginal") {
    const GroupSpec z2 = cyclic_group(2);
    const Interaction qd = quantum_double(2, z2);
    const Lattice& lat = qd.lattice;

    const QdMarginalForm f = qd_marginal_closed(lat, z2, std::log(3.0), {0});
    CHECK(f.gamma == doctest::Approx(1.0));
    CHECK(f.kappa == doctest::Approx(32.0));
    CHECK(f.star_weight == doctest::Approx(0.25));
    CHECK(f.plaquette_weight == doctest::Approx(0.25));
    CHECK(max_abs(f.star_projector * f.star_projector - f.star_projector) < 1e-10);
    CHECK(max_abs(commutator(f.star_projector, f.plaquette_projector)) < 1e-10);
    CHECK(oracle::rel_err(f.materialized, brute_boundary_trace(qd, std::log(3.0), {0})) < 1e-10);

    const QdMarginalForm flat = qd_marginal_closed(lat, z2, 0.0, {0, 1});
    CHECK(max_abs(flat.materialized - 4.0 * identity(flat.materialized.rows())) < 1e-12);

    for (const Sites& r : {Sites{0, 1}, Sites{1, 2, 5}}) {
      if (!connectivity_check(lat, r).by_stars || !connectivity_check(lat, r).by_plaquettes) continue;
      const QdMarginalForm g = qd_marginal_closed(lat, z2, 0.8, r);
      CHECK(oracle::rel_err(g.materialized, brute_boundary_trace(qd, 0.8, r)) < 1e-10);
      CHECK(oracle::rel_err(qd_boundary_trace(lat, z2, 0.8, r), g.materialized) < 1e-10);
    }
    CHECK_THROWS_AS(qd_marginal_closed(Lattice::torus(2, 6), symmetric_group_s3(), 1.0, {0}), Error);
  }

  TEST_CASE("commuting factorization on the quantum double") {
    const GroupSpec z2 = cyclic_group(2);
    const Interaction qd = quantum_double(2, z2);
    const double beta = 0.9;
    const Sites all = all_sites(8);
    const Sites r{2, 3};
    auto expm = [beta](const Mat& h) { return oracle::herm_fn(h, [beta](double e) { return std::exp(-beta * e); }); };
    const Mat full = oracle::partial_trace(expm(qd.hamiltonian()), all, r, 2);
    const Sites rc = complement(r, 8);
    const Mat boundary = embed(brute_boundary_trace(qd, beta, r), region_minus(qd.closure(r), r), rc, 2);
    const Mat rest = expm(qd.hamiltonian_on(rc));
    CHECK(oracle::rel_err(full, boundary * rest) < 1e-10);
  }

  TEST_CASE("quantum double sandwich") {
    const GroupSpec z2 = cyclic_group(2);
    const Lattice lat = Lattice::torus(2, 2);
    const QdSandwich flat = qd_trace_sandwich(lat, z2, 0.0, {0}, false);
    CHECK(flat.lower == doctest::Approx(2.0));
    CHECK(flat.upper == doctest::Approx(2.0));
    const QdSandwich s = qd_trace_sandwich(lat, z2, std::log(3.0), {0}, true);
    CHECK(s.defect_bound == doctest::Approx(0.75));
    CHECK(s.checked);
    CHECK(s.inside);
    const QdSandwich s1 = qd_trace_sandwich(lat, z2, 1.0, {0}, true);
    CHECK(s1.inside);
    CHECK(s1.lower <= s1.spectrum_min + 1e-10 * s1.kappa);
  }
}
