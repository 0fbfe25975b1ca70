#include "doctest.h"
#include "pgap_cli/reference.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/models.hpp"

#include <Eigen/Eigenvalues>

using namespace pgap;

TEST_SUITE("models") {
  TEST_CASE("ising ring") {
    const Interaction phi = ising_ring(3);
    CHECK(phi.terms.size() == 3);
    CHECK(phi.range() == 2);
    CHECK(phi.strength() == doctest::Approx(2.0));
    CHECK(phi.check_commuting());
    const Mat h = phi.hamiltonian();
    for (long long c = 0; c < 8; ++c) CHECK(h(c, c).real() == doctest::Approx(oracle::ising_energy(c, 3)));
    CHECK(max_abs(h - Mat(h.diagonal().asDiagonal())) == 0.0);

    const Interaction two = ising_ring(2);
    REQUIRE(two.terms.size() == 2);
    CHECK(max_abs(two.terms[0].m - two.terms[1].m) == 0.0);
    CHECK_THROWS_AS(ising_ring(1), Error);
  }

  TEST_CASE("random ring") {
    const Interaction a = random_ring(6, 2, 1.0, 7);
    const Interaction b = random_ring(6, 2, 1.0, 7);
    REQUIRE(a.terms.size() == b.terms.size());
    for (size_t k = 0; k < a.terms.size(); ++k) CHECK(max_abs(a.terms[k].m - b.terms[k].m) == 0.0);
    CHECK(a.strength() <= 1.0 + 1e-12);
    CHECK_FALSE(a.check_commuting());
    const DensityMatrix sigma = gibbs_state(a, 1.0);
    CHECK(sigma.min_eigenvalue() > 0.0);
    CHECK_THROWS_AS(random_ring(6, 6, 1.0, 7), Error);
    CHECK_THROWS_AS(random_ring(6, 0, 1.0, 7), Error);
  }

  TEST_CASE("groups") {
    const GroupSpec z2 = cyclic_group(2);
    CHECK(z2.mul[1][1] == 0);
    CHECK(z2.characters[1][1] == cplx(-1.0));
    const GroupSpec z3 = cyclic_group(3);
    const cplx w = std::polar(1.0, 2.0 * M_PI / 3.0);
    CHECK(std::abs(z3.characters[1][1] - w) < 1e-14);
    CHECK(std::abs(z3.characters[1][2] - w * w) < 1e-14);

    const GroupSpec s3 = symmetric_group_s3();
    CHECK_FALSE(s3.abelian);
    CHECK(s3.characters.empty());
    s3.validate();
    for (int g = 0; g < 6; ++g) {
      const Mat l = s3.left_regular(g);
      CHECK(l.cwiseAbs().sum() == doctest::Approx(6.0));
      for (int h = 0; h < 6; ++h) {
        CHECK(max_abs(l * s3.left_regular(h) - s3.left_regular(s3.op(g, h))) == 0.0);
        CHECK(max_abs(s3.right_regular(g) * s3.right_regular(h) - s3.right_regular(s3.op(g, h))) == 0.0);
        CHECK(max_abs(l * s3.right_regular(h) - s3.right_regular(h) * l) == 0.0);
      }
    }
    CHECK_THROWS_AS(group_from_table({{0, 1}, {0, 1}}, "bad"), Error);
  }

  TEST_CASE("star operators form a representation") {
    for (const GroupSpec& g : {cyclic_group(2), cyclic_group(3)}) {
      const Lattice lat = Lattice::torus(2, g.order);
      for (int a = 0; a < g.order; ++a)
        for (int b = 0; b < g.order; ++b) {
          const Mat pa = star_operator(lat, g, 0, a).m;
          const Mat pb = star_operator(lat, g, 0, b).m;
          CHECK(max_abs(pa * pb - star_operator(lat, g, 0, g.op(a, b)).m) < 1e-12);
          CHECK(max_abs(pa.adjoint() - star_operator(lat, g, 0, g.inv[a]).m) < 1e-12);
        }
      const Mat avg = star_operator(lat, g, 1, std::nullopt).m;
      CHECK(max_abs(avg * avg - avg) < 1e-12);
      CHECK(max_abs(avg - avg.adjoint()) < 1e-12);
      CHECK(max_abs(star_operator(lat, g, 0, g.identity).m - identity(avg.rows())) == 0.0);
    }
    CHECK_THROWS_AS(star_operator(Lattice::ring(4, 2), cyclic_group(2), 0, 0), Error);
  }

  TEST_CASE("plaquette operators") {
    const GroupSpec z2 = cyclic_group(2);
    const Lattice lat = Lattice::torus(2, 2);
    const Mat triv = plaquette_operator(lat, z2, 0, 0).m;
    CHECK(max_abs(triv - identity(16)) < 1e-14);
    const Mat delta = plaquette_operator(lat, z2, 0, kDeltaIdentity).m;
    for (long long i = 0; i < 16; ++i) {
      const auto dg = oracle::digits(i, 4, 2);
      const int parity = (dg[0] + dg[1] + dg[2] + dg[3]) % 2;
      CHECK(delta(i, i).real() == doctest::Approx(parity == 0 ? 1.0 : 0.0));
    }
    CHECK(max_abs(plaquette_from_characters(lat, z2, 0).m - delta) < 1e-14);

    const GroupSpec z3 = cyclic_group(3);
    const Lattice lat3 = Lattice::torus(2, 3);
    CHECK(max_abs(plaquette_from_characters(lat3, z3, 1).m - plaquette_operator(lat3, z3, 1, kDeltaIdentity).m) <
          1e-12);

    const GroupSpec s3 = symmetric_group_s3();
    const Lattice lat6 = Lattice::torus(2, 6);
    const Mat b6 = plaquette_operator(lat6, s3, 0, kDeltaIdentity).m;
    CHECK(b6.rows() == 1296);
    CHECK(max_abs(b6 * b6 - b6) < 1e-12);
    CHECK_THROWS_AS(plaquette_operator(lat6, s3, 0, 0), Error);
  }

  TEST_CASE("quantum double Z2 is the toric code") {
    const GroupSpec z2 = cyclic_group(2);
    const Interaction qd = quantum_double(2, z2);
    CHECK(qd.terms.size() == 8);
    CHECK(qd.lattice.site_count() == 8);
    CHECK(qd.max_commutator() <= 1e-12);
    const Mat x = pauli('X'), z = pauli('Z');
    const Mat xxxx = kron(kron(x, x), kron(x, x));
    const Mat zzzz = kron(kron(z, z), kron(z, z));
    const Mat one = identity(16);
    for (const Operator& t : qd.terms) {
      CHECK(max_abs(t.m * t.m + t.m) < 1e-12);  // -P with P a projection
      const bool is_star = max_abs(-t.m - 0.5 * (one + xxxx)) < 1e-12;
      const bool is_plaq = max_abs(-t.m - 0.5 * (one + zzzz)) < 1e-12;
      CHECK((is_star || is_plaq));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(qd.hamiltonian(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-8.0).epsilon(1e-12));
  }

  TEST_CASE("nonabelian quantum double terms commute") {
    // A_s(g) is a permutation of basis states and B_p is diagonal: they commute iff the diagonal
    // of B_p is invariant under the permutation on the joint support. Checked without forming
    // matrices on the 6-edge union.
    const GroupSpec s3 = symmetric_group_s3();
    const Lattice lat = Lattice::torus(2, 6);
    for (int g = 0; g < 6; ++g) {
      const Operator a = star_operator(lat, s3, 0, g);
      std::vector<long long> perm(a.m.cols());
      for (long long j = 0; j < a.m.cols(); ++j) {
        Eigen::Index row = 0;
        a.m.col(j).cwiseAbs().maxCoeff(&row);
        perm[j] = row;
      }
      for (int face = 0; face < 4; ++face) {
        const Operator b = plaquette_operator(lat, s3, face, kDeltaIdentity);
        const Sites sup = region_union(a.support, b.support);
        const int n = static_cast<int>(sup.size());
        bool ok = true;
        for (long long i = 0; i < oracle::power(6, n) && ok; ++i) {
          const auto dg = oracle::digits(i, n, 6);
          std::vector<int> sd, bd;
          for (int e : a.support) sd.push_back(dg[oracle::position(sup, e)]);
          const auto moved = oracle::digits(perm[oracle::index_of(sd, 6)], 4, 6);
          auto dg2 = dg;
          for (int k = 0; k < 4; ++k) dg2[oracle::position(sup, a.support[k])] = moved[k];
          std::vector<int> b1, b2;
          for (int e : b.support) {
            b1.push_back(dg[oracle::position(sup, e)]);
            b2.push_back(dg2[oracle::position(sup, e)]);
          }
          ok = std::abs(b.m(oracle::index_of(b1, 6), oracle::index_of(b1, 6)) -
                        b.m(oracle::index_of(b2, 6), oracle::index_of(b2, 6))) < 1e-12;
        }
        CHECK(ok);
      }
    }
  }
}
