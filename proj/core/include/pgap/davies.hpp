#pragma once

#include "pgap/algebra.hpp"
#include "pgap/models.hpp"
#include "pgap/purified.hpp"

#include <string>

namespace pgap {

struct BohrDecomposition {
  std::vector<double> frequencies;  // sorted
  std::vector<Mat> components;      // S(omega), same order
  Mat reconstruct() const;
};

// S(omega) = sum_{E' - E = omega} P_E S P_E'; energies and frequencies merged within freq_tol
// (freq_tol < 0 selects 1e-8 ||H||)
BohrDecomposition bohr_decompose(const Mat& h, const Mat& s, double freq_tol = -1.0);

// non-identity elements of the Hermitian single-site basis, scaled to unit operator norm
std::vector<Mat> default_couplings(int d);

enum class RateProfile { glauber, sqrt };
RateProfile rate_profile_from_name(const std::string& name);
const char* rate_profile_name(RateProfile p);
std::function<double(double)> rate_profile(RateProfile p, double beta);

// Q -> A Q B on column-major vectorized operators
Mat sandwich_matrix(const Mat& a, const Mat& b);
// Heisenberg Lindblad term Q -> S^dag Q S - 1/2 {S^dag S, Q}
Mat lindblad_term(const Mat& s);

struct Jump {
  int site = 0;
  int alpha = 0;
  double omega = 0.0;  // >= 0; the -omega partner is folded into the same dissipator
  Mat v;               // g(omega)^{1/2} S(omega), full lattice
  Mat v_partner;       // g(-omega)^{1/2} S(omega)^dag (empty for omega = 0)
  Mat dissipator;      // dense D^2 x D^2 generator of this jump pair
};

struct DaviesGenerator {
  Mat h;
  double beta = 0.0;
  int n_sites = 0;
  int d = 2;
  RateProfile profile = RateProfile::glauber;
  std::vector<Jump> jumps;
  std::vector<Mat> site_dissipators;  // D_x, dense
  Mat dissipator;                     // D = sum_x D_x
  Mat generator;                      // L = i[H, .] + D (Heisenberg picture)
  Mat generator_dual() const { return generator.adjoint(); }
  // per site coupling families used
  std::vector<std::vector<Mat>> couplings;
};

constexpr long long kDenseGeneratorDim = 4096;  // largest D^2

// couplings[x] are single-site operators at site x; empty selects default_couplings at every site
DaviesGenerator build_davies(const Interaction& phi, double beta, std::vector<std::vector<Mat>> couplings = {},
                             RateProfile profile = RateProfile::glauber);

// || Gamma D - D^* Gamma || / || D || with Gamma(Q) = Q sigma; zero map gives 0
double db_defect(const Mat& d, const DensityMatrix& sigma);
// Q -> -D(Q sigma^{-1/2}) sigma^{1/2}, dense
Mat purified_dissipator(const Mat& d, const DensityMatrix& sigma, double reversibility_tol = 1e-8);
SuperOperator as_super_operator(const Mat& dense, long long dim, bool hs_hermitian, bool psd);

struct PrimitivityResult {
  bool primitive = false;
  std::vector<Mat> kernel;  // pre-purification kernel elements
  double worst_residual = 0.0;
};
PrimitivityResult local_primitivity_check(const Mat& d_x, const DensityMatrix& sigma, int site, double kernel_rel_tol = 1e-10);

// dimension of the commutant of a set of operators, from the nullspace of the commutator stack
long long commutant_dimension(const std::vector<Mat>& ops, double rel_tol = 1e-10);
// dimension of the kernel of a dense map
long long kernel_dimension(const Mat& m, double rel_tol = 1e-10);

struct DissipatorGaps {
  std::vector<double> site_gaps;
  double min_site_gap = 0.0;
  double global_gap = 0.0;
  double purified_gap = 0.0;  // gap of H_Lambda for the same state
  double margin = 0.0;        // global - min_site * purified
};
DissipatorGaps dissipator_gaps(const DaviesGenerator& g, const DensityMatrix& sigma);

struct TrajectoryPoint {
  double t = 0.0;
  double distance = 0.0;  // || rho(t) - sigma ||_1
  double bound = 0.0;     // sigma_min^{-1/2} e^{-t gap}
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};
std::vector<TrajectoryPoint> evolve(const DaviesGenerator& g, const DensityMatrix& sigma, const Mat& rho0,
                                    const std::vector<double>& times, double gap);

}  // namespace pgap
