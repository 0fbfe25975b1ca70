#include "doctest.h"
#include "pgap_cli/reference.hpp"
#include "pgap/davies.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/rng.hpp"

#include <Eigen/Eigenvalues>

using namespace pgap;

TEST_SUITE("davies") {
  TEST_CASE("bohr decomposition") {
    const Mat z = pauli('Z'), x = pauli('X');
    const BohrDecomposition zz = bohr_decompose(z, z);
    REQUIRE(zz.frequencies.size() == 1);
    CHECK(zz.frequencies[0] == 0.0);
    CHECK(max_abs(zz.components[0] - z) < 1e-14);

    const BohrDecomposition zx = bohr_decompose(z, x);
    REQUIRE(zx.frequencies.size() == 2);
    CHECK(zx.frequencies[0] == doctest::Approx(-2.0));
    CHECK(zx.frequencies[1] == doctest::Approx(2.0));
    CHECK(max_abs(zx.reconstruct() - x) < 1e-14);
    CHECK(max_abs(zx.components[0].adjoint() - zx.components[1]) < 1e-14);

    const BohrDecomposition one = bohr_decompose(z, identity(2));
    REQUIRE(one.frequencies.size() == 1);
    CHECK(max_abs(one.components[0] - identity(2)) < 1e-14);

    // modular relation on a random Hamiltonian
    CounterRng rng(41);
    const Mat h = random_hermitian(rng, 4);
    const Mat s = random_hermitian(rng, 4);
    const double beta = 0.8;
    const Mat sigma = oracle::herm_fn(h, [beta](double e) { return std::exp(-beta * e); });
    const Mat sigma_inv = oracle::herm_fn(h, [beta](double e) { return std::exp(beta * e); });
    const BohrDecomposition bd = bohr_decompose(h, s);
    CHECK(max_abs(bd.reconstruct() - s) < 1e-10);
    for (size_t k = 0; k < bd.frequencies.size(); ++k) {
      const Mat lhs = sigma * bd.components[k] * sigma_inv;
      const Mat rhs = std::exp(beta * bd.frequencies[k]) * bd.components[k];
      CHECK(oracle::rel_err(lhs, rhs) < 1e-8);
    }
  }

  TEST_CASE("couplings and rates") {
    CHECK(default_couplings(2).size() == 3);
    CHECK(default_couplings(3).size() == 8);
    const std::vector<Mat> pauli_on_0{kron(pauli('X'), identity(2)), kron(pauli('Y'), identity(2)),
                                      kron(pauli('Z'), identity(2))};
    CHECK(commutant_dimension(pauli_on_0) == 4);

    const auto g = rate_profile(RateProfile::glauber, 1.0);
    CHECK(g(0.0) == 1.0);
    CHECK(g(-2.0) == doctest::Approx(std::exp(-2.0)));
    for (RateProfile p : {RateProfile::glauber, RateProfile::sqrt})
      for (double w : {1.0, 2.0, -1.0, -2.0}) {
        const auto f = rate_profile(p, 0.7);
        CHECK(std::abs(f(-w) - std::exp(-0.7 * w) * f(w)) <= 1e-15 * f(w));
      }
    CHECK(rate_profile_from_name("sqrt") == RateProfile::sqrt);
    CHECK_THROWS_AS(rate_profile_from_name("metropolis"), Error);
  }

  TEST_CASE("single qubit generator matches the hand-computed Liouvillian") {
    // H = Z, coupling X: jumps sigma_- (omega = 2, lowering energy) and sigma_+ (omega = -2).
    const Interaction phi = custom_interaction(Lattice::ring(1, 2), {Operator{{0}, -pauli('Z')}});
    const double beta = 0.6;
    const DaviesGenerator g = build_davies(phi, beta, {{pauli('X')}});
    // In the Heisenberg picture, the matrix units evolve as:
    //   |0><1| and |1><0| decay with rate (g(2) + g(-2))/2 and rotate with the Hamiltonian,
    //   populations relax to the Gibbs ratio.
    const DensityMatrix sigma = gibbs_state(phi.hamiltonian(), 1, 2, beta);
    CHECK(op_norm(unvec(g.generator_dual() * vec(sigma.matrix()), 2)) < 1e-12);
    CHECK(max_abs(unvec(g.generator * vec(identity(2)), 2)) < 1e-12);
    Eigen::ComplexEigenSolver<Mat> es(g.dissipator);
    std::vector<double> re;
    for (Eigen::Index i = 0; i < 4; ++i) re.push_back(es.eigenvalues()(i).real());
    std::sort(re.begin(), re.end());
    const auto rate = rate_profile(RateProfile::glauber, beta);
    const double up = rate(-2.0), down = rate(2.0);
    CHECK(re[0] == doctest::Approx(-(up + down)).epsilon(1e-10));
    CHECK(re[1] == doctest::Approx(-(up + down) / 2).epsilon(1e-10));
    CHECK(re[2] == doctest::Approx(-(up + down) / 2).epsilon(1e-10));
    CHECK(std::abs(re[3]) < 1e-12);
  }

  TEST_CASE("ising davies invariants") {
    for (double beta : {0.0, 1.0}) {
      const Interaction phi = ising_ring(3);
      const DensityMatrix sigma = gibbs_state(phi, beta);
      const DaviesGenerator g = build_davies(phi, beta);
      CHECK(db_defect(g.dissipator, sigma) <= 1e-10);
      CHECK(op_norm(unvec(g.generator_dual() * vec(sigma.matrix()), 8)) <= 1e-9);
      CHECK(max_abs(unvec(g.generator * vec(identity(8)), 8)) <= 1e-10);
      CounterRng rng(42);
      const Mat rho = random_density(rng, 8);
      CHECK(std::abs(unvec(g.generator_dual() * vec(rho), 8).trace()) < 1e-10);
      for (const Jump& j : g.jumps) {
        for (int k = 0; k < 3; ++k) {
          const Mat q = random_complex(rng, 8, 8);
          const cplx val = gns_inner(sigma, q, unvec(j.dissipator * vec(q), 8));
          CHECK(-val.real() >= -1e-10);
        }
        std::vector<Mat> vs{j.v, j.v.adjoint()};
        if (j.v_partner.size()) {
          vs.push_back(j.v_partner);
          vs.push_back(j.v_partner.adjoint());
        }
        CHECK(kernel_dimension(j.dissipator) == commutant_dimension(vs));
      }
      Eigen::ComplexEigenSolver<Mat> es(g.generator, false);
      CHECK(es.eigenvalues().real().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("derivation is not reversible") {
    const Interaction phi = ising_ring(2);
    const DensityMatrix sigma = gibbs_state(phi, 1.0);
    const Mat h = phi.hamiltonian();
    const Mat deriv = cplx(0, 1) * (sandwich_matrix(h, identity(4)) - sandwich_matrix(identity(4), h));
    CHECK(db_defect(deriv, sigma) > 0.5);
    CHECK(db_defect(Mat::Zero(16, 16), sigma) == 0.0);
  }

  TEST_CASE("purified dissipator spectrum") {
    const Interaction phi = ising_ring(3);
    const DensityMatrix sigma = gibbs_state(phi, 1.0);
    const DaviesGenerator g = build_davies(phi, 1.0);
    const Mat pd = purified_dissipator(g.site_dissipators[0], sigma);
    CHECK(max_abs(pd - pd.adjoint()) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(pd), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) > -1e-10);
    // GNS eigenvalues of D_x: D_x is self-adjoint in <.,.>_sigma, so its eigenvalues are real
    Eigen::ComplexEigenSolver<Mat> ed(g.site_dissipators[0], false);
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < ed.eigenvalues().size(); ++i) a.push_back(-ed.eigenvalues()(i).real());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) b.push_back(es.eigenvalues()(i));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8);

    const DensityMatrix flat(identity(8) / 8.0, 3, 2);
    const DaviesGenerator g0 = build_davies(phi, 0.0);
    CHECK(max_abs(purified_dissipator(g0.site_dissipators[1], flat) + g0.site_dissipators[1]) < 1e-12);
    CHECK(max_abs(purified_dissipator(Mat::Zero(64, 64), sigma)) == 0.0);

    const Mat deriv = cplx(0, 1) * (sandwich_matrix(phi.hamiltonian(), identity(8)) -
                                   sandwich_matrix(identity(8), phi.hamiltonian()));
    CHECK_THROWS_AS(purified_dissipator(deriv + g.site_dissipators[0], gibbs_state(ising_ring(3), 0.3)), Error);
  }

  TEST_CASE("local primitivity") {
    const Interaction phi = ising_ring(3);
    const DensityMatrix sigma = gibbs_state(phi, 1.0);
    const DaviesGenerator g = build_davies(phi, 1.0);
    const PrimitivityResult ok = local_primitivity_check(g.site_dissipators[0], sigma, 0);
    CHECK(ok.primitive);
    std::vector<Mat> site_ops;
    for (const Jump& j : g.jumps) {
      if (j.site != 0) continue;
      site_ops.push_back(j.v);
      site_ops.push_back(j.v.adjoint());
    }
    CHECK(static_cast<long long>(ok.kernel.size()) == commutant_dimension(site_ops));
    CHECK(ok.kernel.size() < 64);

    std::vector<std::vector<Mat>> zonly(3, std::vector<Mat>{pauli('Z')});
    const DaviesGenerator gz = build_davies(phi, 1.0, zonly);
    CHECK_FALSE(local_primitivity_check(gz.site_dissipators[0], sigma, 0).primitive);

    const Interaction single = custom_interaction(Lattice::ring(1, 2), {Operator{{0}, pauli('Z')}});
    const DensityMatrix s1 = gibbs_state(single.hamiltonian(), 1, 2, 0.5);
    const DaviesGenerator g1 = build_davies(single, 0.5);
    const PrimitivityResult p1 = local_primitivity_check(g1.site_dissipators[0], s1, 0);
    CHECK(p1.primitive);
    CHECK(p1.kernel.size() == 1);
  }

  TEST_CASE("gap comparison and decay") {
    for (double beta : {0.5, 1.0}) {
      const Interaction phi = ising_ring(3);
      const DensityMatrix sigma = gibbs_state(phi, beta);
      const DaviesGenerator g = build_davies(phi, beta);
      const DissipatorGaps gaps = dissipator_gaps(g, sigma);
      CHECK(gaps.global_gap >= gaps.min_site_gap * gaps.purified_gap - 1e-8);
      CHECK(gaps.margin >= -1e-8);
    }
    const Interaction single = custom_interaction(Lattice::ring(1, 2), {Operator{{0}, pauli('Z')}});
    const DensityMatrix s1 = gibbs_state(single.hamiltonian(), 1, 2, 0.0);
    const DissipatorGaps g1 = dissipator_gaps(build_davies(single, 0.0), s1);
    CHECK(g1.global_gap == doctest::Approx(g1.site_gaps[0]).epsilon(1e-12));
    CHECK(g1.purified_gap == doctest::Approx(1.0).epsilon(1e-10));

    const Interaction phi = ising_ring(3);
    const DensityMatrix sigma = gibbs_state(phi, 1.0);
    const DaviesGenerator g = build_davies(phi, 1.0);
    const double gap = dissipator_gaps(g, sigma).global_gap;
    Mat rho0 = Mat::Zero(8, 8);
    rho0(0, 0) = 1.0;
    rho0 = 0.99 * rho0 + 0.01 * identity(8) / 8.0;
    std::vector<double> times{0.0};
    for (int k = 1; k < 12; ++k) times.push_back(0.25 * k / gap);
    times.push_back(50.0 / gap);
    const auto traj = evolve(g, sigma, rho0, times, gap);
    CHECK(traj[0].distance == doctest::Approx(trace_norm_hermitian(rho0 - sigma.matrix())).epsilon(1e-12));
    for (const TrajectoryPoint& p : traj) {
      CHECK(p.distance <= p.bound + 1e-8);
      CHECK(p.trace_error <= 1e-9);
      CHECK(p.min_eigenvalue >= -1e-9);
    }
    CHECK(traj.back().distance <= 1e-6);
  }

  TEST_CASE("non-commuting models are rejected") {
    CHECK_THROWS_AS(build_davies(random_ring(3, 2, 1.0, 1), 1.0), Error);
  }
}
