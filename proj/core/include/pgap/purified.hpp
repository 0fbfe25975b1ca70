#pragma once

#include "pgap/algebra.hpp"
#include "pgap/krylov.hpp"
#include "pgap/models.hpp"

#include <memory>
#include <optional>
#include <string>

namespace pgap {

using OpMap = std::function<Mat(const Mat&)>;

// Linear map on the D x D operators of the lattice. Vectorization is column-major.
struct SuperOperator {
  long long dim = 0;  // D
  OpMap apply;
  bool hs_hermitian = false;
  bool psd = false;
  // exact orthogonal projector onto the kernel, when known
  OpMap kernel_projector;
  long long kernel_dim = -1;  // -1 when unknown
  std::vector<Mat> kernel;    // known kernel vectors (need not span the kernel)

  long long vec_dim() const { return dim * dim; }
  Vec apply_vec(const Vec& v) const;
  LinearMap as_linear_map() const;
  Mat materialize() const;
};

Vec vec(const Mat& m);
Mat unvec(const Vec& v, long long dim);

// Cached marginal data for Pi_x and H_X on a fixed state.
class PurifiedContext {
 public:
  explicit PurifiedContext(const DensityMatrix& sigma);

  const DensityMatrix& state() const { return *sigma_; }
  // Tr_X(Q sigma^{1/2}) sigma_{X^c}^{-1} sigma^{1/2}
  Mat project(const Sites& x, const Mat& q) const;
  // orthogonal projection onto W_X as a SuperOperator
  SuperOperator projector(const Sites& x) const;
  // H_X = sum_{x in X} (Id - Pi_x), matrix free
  SuperOperator hamiltonian(const Sites& x) const;

 private:
  struct SiteCache {
    SplitIndex split;  // sub = x^c, rest = x
    Mat inv_marginal;  // sigma_{x^c}^{-1}
  };
  struct Data {
    Mat sqrt;
    Mat rho;
    int n = 0;
    int d = 2;
    std::vector<SiteCache> sites;
  };
  std::shared_ptr<const Data> data_;
  const DensityMatrix* sigma_;
};

Mat pi_project(const DensityMatrix& sigma, const Sites& x, const Mat& q);
SuperOperator purified_hamiltonian(const DensityMatrix& sigma, const Sites& x);

struct GapOptions {
  long long dense_max = 4096;  // largest D^2 for the dense path
  bool force_iterative = false;
  double kernel_rel_tol = 1e-10;
  double tol = 1e-8;
  int max_basis = 48;
  long long max_matvecs = 20000;
  std::uint64_t seed = 0x5eedULL;
};

struct GapResult {
  double gap = 0.0;
  long long kernel_dim = 0;
  std::string method;  // dense | deflated-iterative
  double residual = 0.0;
  double norm = 0.0;
  bool kernel_ambiguous = false;
  long long matvecs = 0;
};

GapResult spectral_gap(const SuperOperator& h, const GapOptions& opts = {});

// || Pi_AB Pi_BC - Pi_ABC || in the HS operator norm
double martingale_defect(const DensityMatrix& sigma, const Sites& a, const Sites& b, const Sites& c,
                         std::uint64_t seed = 0x5eedULL);

enum class EtaMethod { trivial, gibbs_boundary, closed_form, heuristic };
const char* eta_method_name(EtaMethod m);

struct EtaBound {
  double value = 1.0;
  EtaMethod method = EtaMethod::trivial;
  std::optional<Mat> witness;  // invertible operator on X^c
};

// || Q sigma^{-1/2} || || sigma^{1/2} Q^{-1} || for Q on X^c
double eta_from_witness(const DensityMatrix& sigma, const Sites& x, const Mat& q);
EtaBound eta_trivial(const DensityMatrix& sigma);
EtaBound eta_gibbs_boundary(const DensityMatrix& sigma, const Interaction& phi, double beta, const Sites& x);
EtaBound eta_closed_form(const Interaction& phi, double beta, const Sites& x);
// Best-effort local search over Q = e^K Q0 with K Hermitian on X^c. Heuristic upper bound only.
EtaBound eta_refine(const DensityMatrix& sigma, const Sites& x, const EtaBound& start, int iterations,
                    std::uint64_t seed);

double small_region_gap_bound(const EtaBound& eta);

}  // namespace pgap
