#include "doctest.h"
#include "pgap_cli/reference.hpp"
#include "pgap/certify.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/mixing.hpp"
#include "pgap/purified.hpp"
#include "pgap/rng.hpp"

using namespace pgap;

namespace {

Partition part(Sites a, Sites b, Sites c, Sites d) { return Partition{a, b, c, d}; }

double oracle_delta(const DensityMatrix& s, const Partition& p) {
  return oracle::delta_gram(s.matrix(), p.a, p.c, p.d, s.n_sites(), s.local_dim());
}

}  // namespace

TEST_SUITE("mixing") {
  TEST_CASE("partition validation") {
    CHECK_NOTHROW(part({0}, {1, 2, 3, 7}, {4}, {5, 6}).validate(8));
    CHECK_THROWS_AS(part({0}, {1}, {0}, {}).validate(2), Error);
    CHECK_THROWS_AS(part({0}, {1}, {2}, {}).validate(4), Error);
    CHECK_THROWS_AS(part({}, {1}, {2}, {0}).validate(3), Error);
    CHECK(part({0}, {1, 2, 3, 7}, {4}, {5, 6}).format() == "A=0;B=1-3,7;C=4;D=5-6");
  }

  TEST_CASE("direct route matches the Gram-matrix definition") {
    CounterRng rng(31);
    const DensityMatrix sigma(random_density(rng, 16, 1.5), 4, 2);
    for (const Partition& p : {part({0}, {1}, {2}, {3}), part({0}, {}, {2}, {1, 3}), part({1}, {0, 2}, {3}, {}),
                               part({0, 1}, {2}, {3}, {})}) {
      const MixingReport r = delta_direct(sigma, p);
      CHECK(std::abs(r.delta - oracle_delta(sigma, p)) <= 1e-9);
      CHECK(std::abs(r.delta - delta_constrained(sigma, p)) <= 1e-8);
      CHECK(r.delta <= 1.0 + 1e-10);
      const Partition swapped{p.c, p.b, p.a, p.d};
      CHECK(std::abs(delta_direct(sigma, swapped).delta - r.delta) <= 1e-8);
    }
  }

  TEST_CASE("witnesses are GNS normalized and attain delta") {
    const DensityMatrix sigma = gibbs_state(random_ring(4, 2, 1.0, 9), 1.0);
    const Partition p = part({0}, {1}, {2}, {3});
    const MixingReport r = delta_direct(sigma, p);
    const Sites acd{0, 2, 3};
    const Mat s_acd = sigma.marginal(acd);
    const Mat rr = embed(r.r_ad, {0, 3}, acd, 2);
    const Mat qq = embed(r.q_cd, {2, 3}, acd, 2);
    CHECK(std::abs((s_acd * rr.adjoint() * rr).trace() - 1.0) < 1e-10);
    CHECK(std::abs((s_acd * qq.adjoint() * qq).trace() - 1.0) < 1e-10);
    const Mat x = s_acd - embed(sigma.marginal({0, 3}), {0, 3}, acd, 2) *
                              embed(pd_inverse(sigma.marginal({3})), {3}, acd, 2) *
                              embed(sigma.marginal({2, 3}), {2, 3}, acd, 2);
    CHECK(std::abs(std::abs((x * qq.adjoint() * rr).trace()) - r.delta) < 1e-8);
  }

  TEST_CASE("dual-method agreement on ising") {
    const DensityMatrix sigma = gibbs_state(ising_ring(5), 1.0);
    for (const Partition& p : {part({0}, {1}, {2}, {3, 4}), part({0}, {3, 4}, {2}, {1}), part({0}, {1, 3, 4}, {2}, {})}) {
      const double direct = delta_direct(sigma, p).delta;
      CHECK(std::abs(direct - martingale_defect(sigma, p.a, p.b, p.c)) <= 1e-8);
      CHECK(std::abs(direct - delta_constrained(sigma, p)) <= 1e-8);
    }
    // B empty
    const Partition nob = part({0}, {}, {2}, {1, 3, 4});
    CHECK(std::abs(delta_direct(sigma, nob).delta - delta_constrained(sigma, nob)) <= 1e-8);
  }

  TEST_CASE("degenerate anchors") {
    CounterRng rng(32);
    Mat rho = identity(1);
    for (int k = 0; k < 4; ++k) rho = kron(rho, random_density(rng, 2));
    const DensityMatrix prod(rho, 4, 2);
    const Partition p = part({0}, {1}, {2}, {3});
    CHECK(delta_direct(prod, p).delta < 1e-10);
    CHECK(delta_constrained(prod, p) < 1e-10);
    CHECK(delta_upper_bounds(prod, p).half_sum_upper < 1e-10);
    CHECK(corr_lower(prod, {0}, {2}) < 1e-10);
    const DensityMatrix flat(identity(16) / 16.0, 4, 2);
    CHECK(delta_direct(flat, p).delta < 1e-10);
    CHECK(corr_lower(flat, {0}, {2}) < 1e-10);
  }

  TEST_CASE("upper and lower bounds bracket delta") {
    const DensityMatrix sigma = gibbs_state(ising_ring(6), 1.0);
    const Partition p = part({0}, {1, 2, 4, 5}, {3}, {});
    const MixingReport r = delta_direct(sigma, p);
    const DeltaBounds b = delta_upper_bounds(sigma, p);
    REQUIRE(b.d_empty_upper);
    CHECK(r.delta <= *b.d_empty_upper + 1e-8);
    CHECK(r.delta <= b.half_sum_upper + 1e-8);
    CHECK(b.corr_lower <= r.delta + 1e-8);

    const DensityMatrix s4 = gibbs_state(ising_ring(4), 1.0);
    const double t = std::tanh(1.0);
    CHECK(corr_lower(s4, {0}, {2}) >= 2 * t * t / (1 + t * t * t * t) - 1e-8);

    CounterRng rng(33);
    const DensityMatrix rnd(random_density(rng, 16, 2.0), 4, 2);
    for (const Partition& q : {part({0}, {1}, {2}, {3}), part({0}, {1, 3}, {2}, {})}) {
      const double d = delta_direct(rnd, q).delta;
      const DeltaBounds bq = delta_upper_bounds(rnd, q);
      CHECK(d <= bq.half_sum_upper + 1e-8);
      if (bq.d_empty_upper) CHECK(d <= *bq.d_empty_upper + 1e-8);
    }
  }

  TEST_CASE("commuting bound on the quantum double") {
    const Interaction qd = quantum_double(2, cyclic_group(2));
    const DensityMatrix sigma = gibbs_state(qd, 0.7);
    const Partition p = part({0}, {2, 3, 4, 5, 6}, {1}, {7});
    const DeltaBounds b = delta_upper_bounds(sigma, p);
    CHECK(b.marginal_commutator <= 1e-10);
    REQUIRE(b.commuting_upper);
    CHECK(delta_direct(sigma, p).delta <= *b.commuting_upper + 1e-8);
  }

  TEST_CASE("shielded ring geometry and decay") {
    const Partition p = ring_shield_partition(8, 0, 1, 2, 1, ShieldD::i2);
    CHECK(p.format() == "A=0;B=1-2;C=3;D=4-7");
    CHECK(shielding_length(8, p) == 2);
    CHECK_THROWS_AS(shielding_length(8, part({0}, {1, 2, 3, 7}, {4}, {5, 6})), Error);

    const DensityMatrix flat(identity(256) / 256.0, 8, 2);
    std::vector<Partition> parts;
    for (int ell = 1; ell <= 3; ++ell) parts.push_back(ring_shield_partition(8, 0, 1, ell, 1, ShieldD::empty));
    for (const ScanRow& row : delta_decay_scan(flat, parts)) CHECK(row.delta < 1e-10);

    const DensityMatrix sigma = gibbs_state(ising_ring(8), 1.0);
    const auto rows = delta_decay_scan(sigma, parts, [](int ell) { return ising_delta(ell, 1.0); });
    for (const ScanRow& row : rows) {
      REQUIRE(row.envelope);
      CHECK(row.delta <= *row.envelope + 1e-8);
    }
  }
}
