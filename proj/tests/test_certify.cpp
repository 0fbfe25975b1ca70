#include "doctest.h"
#include "pgap/certify.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/purified.hpp"

#include <cmath>

using namespace pgap;

TEST_SUITE("certify") {
  TEST_CASE("divide and conquer step") {
    CHECK(dq_step(1.0, 0.0, 1000000) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(dq_step(0.8, 0.25, 1) == doctest::Approx(0.8 * 0.75 / 2));
    CHECK(dq_step(0.5, 0.1, 3) == doctest::Approx(0.3375).epsilon(1e-15));
    CHECK_THROWS_AS(dq_step(1.0, 1.0, 1), Error);
    CHECK_THROWS_AS(dq_step(1.0, -0.1, 1), Error);
  }

  TEST_CASE("tail product") {
    const ProductResult zero = tail_product([](long long) { return 0.0; });
    CHECK(zero.value == 1.0);
    CHECK(zero.truncation_error == 0.0);
    CHECK_THROWS_AS(tail_product([](long long k) { return k == 0 ? 1.0 : 0.0; }), Error);
    CHECK_THROWS_AS(tail_product([](long long) { return 0.9; }), Error);

    auto x = [](long long k) { return std::exp(-std::pow(9.0 / 8.0, static_cast<double>(k))); };
    const ProductResult a = tail_product(x, 1e-16);
    CHECK(a.truncation_error <= 1e-14);
    const ProductResult b = tail_product(x, 1e-16, 0, a.terms + 40);
    CHECK(std::abs(a.value - b.value) <= 1e-14 * b.value);
    const long double ext =
        tail_product_extended([](long long k) { return std::exp(-std::pow(9.0L / 8.0L, static_cast<long double>(k))); });
    CHECK(std::abs(a.value - static_cast<double>(ext)) <= 1e-12 * a.value);

    // slowly decaying with plateaus
    auto slow = [](long long k) { return 1.0 / std::floor(std::pow(1.1, static_cast<double>(k)) + 2.0); };
    const ProductResult c = tail_product(slow, 1e-12);
    const ProductResult d = tail_product(slow, 1e-12, 0, c.terms + 400);
    CHECK(std::abs(c.value - d.value) <= 1e-11 * d.value);

    // log space for tiny factors
    const ProductResult e = tail_product([](long long k) { return k < 3 ? 1.0 - 1e-10 : 0.0; });
    CHECK(e.log_space);
  }

  TEST_CASE("ising envelope") {
    CHECK(ising_delta(3, 0.0) == 0.0);
    CHECK(ising_delta(2, 1.0) == doctest::Approx(0.92934).epsilon(1e-5));
    double prev = 1.0;
    for (long long ell = 1; ell < 200; ++ell) {
      const double v = ising_delta(ell, 1.0);
      CHECK(v <= prev);
      prev = v;
    }
    CHECK(prev < 1e-20);
    CHECK(std::abs(ising_delta(5, 1.3) - static_cast<double>(ising_delta_extended(5, 1.3L))) <= 1e-12 * ising_delta(5, 1.3));
  }

  TEST_CASE("quantum double envelopes") {
    const QdDelta low = qd_abelian_delta(1, std::log(3.0), 2, true);
    CHECK(low.below_floor);
    CHECK(low.exact == doctest::Approx(728.0 / 729.0).epsilon(1e-14));
    CHECK_THROWS_AS(qd_abelian_delta(1, std::log(3.0), 2), Error);
    CHECK(qd_abelian_delta(3, 0.0, 2).exact == 0.0);
    for (long long ell = 2; ell < 12; ++ell) {
      const QdDelta v = qd_abelian_delta(ell, 1.0, 3);
      CHECK(v.exact <= v.envelope * (1.0 + 1e-14));
    }

    const long long mu = qd_mu_beta(0.1, 6);
    CHECK(mu == static_cast<long long>(std::ceil(512 * std::exp(0.1) * (1 + std::log(6.0)))));
    CHECK(qd_general_delta(mu, 0.0, 6) == 0.0);
    CHECK(qd_general_delta(mu + 1, 0.1, 6) <= qd_general_delta(mu, 0.1, 6));
    try {
      qd_general_delta(mu - 1, 0.1, 6);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(std::to_string(mu)) != std::string::npos);
    }
  }

  TEST_CASE("one dimensional certificate") {
    const Certificate c = certificate_1d(ising_envelope(0.0), 1.0, 16, 9);
    CHECK(c.lower_bound == doctest::Approx(std::exp(-5.0)).epsilon(1e-14));
    CHECK(c.family == "ising-1d");
    CHECK_THROWS_AS(certificate_1d(ising_envelope(0.5), 1.0, 16, 8), Error);

    const Interaction phi = ising_ring(16);
    const double eta = eta_closed_form(phi, 0.5, all_sites(9)).value;
    const Certificate d = certificate_1d(ising_envelope(0.5), eta, 16, 9);
    CHECK(d.lower_bound > 0.0);
    CHECK(std::abs(d.recompute() - d.lower_bound) <= 1e-14 * d.lower_bound);
    CHECK(d.product_truncation_error <= 1e-14);
    for (const RecursionRow& r : d.trace) {
      CHECK(r.delta >= 0.0);
      CHECK(r.delta < 1.0);
    }
  }

  TEST_CASE("two dimensional and nD certificates") {
    const Certificate flat = certificate_2d(qd_abelian_envelope(0.0, 2), 1.0, 256, 256);
    CHECK(flat.lower_bound == doctest::Approx(std::exp(-11.0)).epsilon(1e-14));
    const Certificate qd = certificate_2d(qd_abelian_envelope(0.3, 2), 2.0, 256, 256);
    CHECK(qd.lower_bound > 0.0);
    CHECK(qd.family == "qd-abelian-2d");
    CHECK(std::abs(qd.recompute() - qd.lower_bound) <= 1e-14 * qd.lower_bound);
    const DeltaEnvelope one{"synthetic", [](long long) { return 1.0; }, 1};
    CHECK_THROWS_AS(certificate_2d(one, 1.0, 256, 256), Error);
    CHECK_THROWS_AS(certificate_2d(qd_abelian_envelope(0.3, 2), 1.0, 256, 255), Error);

    const Certificate nd0 = certificate_nd({0.0, 0.0}, [](long long) { return 0.0; }, 1.0, 2);
    double expect = 0.25;
    const long long k_min = static_cast<long long>(std::ceil(2 * std::log(64.0) / std::log(1.5)));
    for (long long k = k_min; k < k_min + 4000; ++k)
      expect /= 1.0 + 1.0 / std::floor(std::sqrt(std::pow(1.5, k / 2.0)));
    CHECK(nd0.lower_bound == doctest::Approx(expect).epsilon(1e-12));
    const Certificate nd1 = certificate_nd({0.1, 0.1}, [](long long) { return 0.0; }, 1.0, 2);
    CHECK(nd1.lower_bound == doctest::Approx(0.81 * expect).epsilon(1e-12));
    CHECK_THROWS_AS(certificate_nd({1.0}, [](long long) { return 0.0; }, 1.0, 1), Error);
  }

  TEST_CASE("corollaries") {
    const Certificate i0 = ising_gap_corollary(0.0);
    const Certificate i0b = ising_gap_corollary(0.0);
    CHECK(i0.lower_bound == i0b.lower_bound);
    CHECK(i0.lower_bound < std::exp(-5.0));
    double prev = i0.lower_bound;
    for (double beta = 0.1; beta < 3.0; beta += 0.1) {
      const double v = ising_gap_corollary(beta).lower_bound;
      CHECK(v < prev);
      prev = v;
    }
    const Certificate i1 = ising_gap_corollary(1.0);
    CHECK(std::abs(i1.log_value - static_cast<double>(ising_gap_corollary_log_extended(1.0L))) <=
          1e-12 * std::abs(i1.log_value));
    CHECK(std::abs(i1.recompute() - i1.lower_bound) <= 1e-14 * i1.lower_bound);

    const Certificate q0 = qd_abelian_gap_corollary(0.0, 2);
    double prod = 1.0;
    for (int k = 1; k < 400; ++k) prod *= 1.0 - std::exp(-std::pow(9.0 / 8.0, k));
    CHECK(q0.lower_bound == doctest::Approx(std::exp(-11.0) * prod).epsilon(1e-13));
    CHECK(qd_abelian_gap_corollary(0.5, 4).log_value < qd_abelian_gap_corollary(0.5, 2).log_value);
    const Certificate q3 = qd_abelian_gap_corollary(0.3, 2);
    CHECK(q3.readings.at("printed") > q3.readings.at("derived"));
    CHECK(q3.lower_bound >= 0.0);
    CHECK(!q3.printed_form.empty());

    const Certificate g0 = qd_general_gap_corollary(0.0, 6);
    CHECK(g0.parameters.at("mu_beta") == std::ceil(512 * (1 + std::log(6.0))));
    CHECK(g0.lower_bound > 0.0);
    for (double beta : {0.01, 0.1, 1.0})
      for (int order : {2, 6}) CHECK(std::isfinite(qd_general_gap_corollary(beta, order).log_value));
  }

  TEST_CASE("sufficient condition") {
    CHECK(sufficient_condition_delta(std::exp(-2.0)) == doctest::Approx(0.724062).epsilon(1e-5));
    CHECK(sufficient_condition_delta(1e-9) / 1e-9 == doctest::Approx(4.0).epsilon(1e-6));
    CHECK_THROWS_AS(sufficient_condition_delta(1.0), Error);

    const GroupSpec z2 = cyclic_group(2);
    const Interaction qd = quantum_double(2, z2);
    // first single-edge A, C pair whose regions AB, B, BC, ABC are all star and plaquette connected
    bool found = false;
    for (int a = 0; a < 8 && !found; ++a)
      for (int c = a + 1; c < 8 && !found; ++c) {
        Partition p{{a}, {}, {c}, {}};
        for (int e = 0; e < 8; ++e)
          if (e != a && e != c) p.b.push_back(e);
        bool ok = true;
        for (const Sites& r : {region_union(p.a, p.b), p.b, region_union(p.b, p.c), all_sites(8)}) {
          const Connectivity cn = connectivity_check(qd.lattice, r);
          ok = ok && cn.by_stars && cn.by_plaquettes;
        }
        if (!ok) continue;
        found = true;
        const BoundaryCheck bc = boundary_hypothesis_check(qd, 0.3, p, &z2);
        CHECK(bc.kappa_residual <= 1e-10);
      }
    CHECK(found);
    CHECK_THROWS_AS(boundary_hypothesis_check(random_ring(4, 2, 1.0, 3), 1.0, Partition{{0}, {1}, {2}, {3}}), Error);
  }
}
