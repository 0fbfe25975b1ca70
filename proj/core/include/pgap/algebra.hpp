#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgap {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Sites = std::vector<int>;

enum class ErrorKind {
  dimension,
  region,
  rank,
  parameter,
  capacity,
  hypothesis,
  capability,
  numerical,
  partition,
  domain,
  contract,
  geometry,
  divergence,
  model,
  interval,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + " error: " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Sites of a ring are 0..N-1. Torus edges are indexed lexicographically by
// (x, y, orientation) with orientation 0 = horizontal, 1 = vertical.
// Horizontal edges point left, vertical edges point down:
//   h(x,y) runs (x+1,y) -> (x,y),   v(x,y) runs (x,y+1) -> (x,y).
struct Lattice {
  enum class Kind { ring, torus_edges };

  Kind kind = Kind::ring;
  int n = 0;
  int d = 2;

  static Lattice ring(int n, int d = 2);
  static Lattice torus(int n, int d);

  int site_count() const;
  long long dim() const;  // d^site_count, may overflow for big lattices: checked

  // torus helpers
  int edge(int x, int y, int orient) const;
  int vertex_count() const { return n * n; }
  int face_count() const { return n * n; }
  // star edges in the order (top, left, bottom, right)
  std::array<int, 4> star(int vertex) const;
  // which star edges start at the vertex (true) or end at it (false)
  static std::array<bool, 4> star_outgoing();
  // plaquette edges in the order (top, left, bottom, right); face = lower-left corner
  std::array<int, 4> plaquette(int face) const;
  std::vector<int> stars_of_edge(int e) const;
  std::vector<int> plaquettes_of_edge(int e) const;
  std::string describe() const;
};

// region helpers; all take and return strictly increasing site lists
void validate_region(const Sites& r, int site_count);
Sites normalize_region(Sites r);
Sites all_sites(int site_count);
Sites complement(const Sites& r, int site_count);
Sites region_union(const Sites& a, const Sites& b);
Sites region_intersection(const Sites& a, const Sites& b);
Sites region_minus(const Sites& a, const Sites& b);
bool is_subset(const Sites& a, const Sites& b);
long long ipow(long long base, int exp);

struct Operator {
  Sites support;
  Mat m;
};

// Index table for a composite system `sup` split into `sub` and the rest.
// full index = table[a * rest_dim + b], a indexes sub, b indexes sup \ sub.
struct SplitIndex {
  int sub_dim = 1;
  int rest_dim = 1;
  std::vector<int> table;
  int operator()(int a, int b) const { return table[static_cast<size_t>(a) * rest_dim + b]; }
};
SplitIndex split_index(const Sites& sup, const Sites& sub, int d);
// out(a1, a2) = sum_b m(s(a1, b), s(a2, b)): trace over the rest, keep sub
Mat trace_rest(const Mat& m, const SplitIndex& s);
// m on sub tensored with the identity on the rest, in the order of sup
Mat embed_split(const Mat& m, const SplitIndex& s);

Operator embed(const Operator& op, const Sites& target, int d);
Mat embed(const Mat& m, const Sites& support, const Sites& target, int d);
Operator partial_trace(const Operator& op, const Sites& traced, int d);
Mat partial_trace(const Mat& m, const Sites& support, const Sites& traced, int d);

cplx hs_inner(const Mat& a, const Mat& b);
cplx hs_inner(const Operator& a, const Operator& b);

std::vector<Mat> single_site_basis(int d);
std::vector<Mat> herm_basis(int k, int d);
std::vector<Operator> herm_basis(const Sites& region, int d);

Mat kron(const Mat& a, const Mat& b);
Mat identity(long long dim);
Mat pauli(char which);
Mat commutator(const Mat& a, const Mat& b);

bool is_hermitian(const Mat& m, double rtol = 1e-12);
Mat hermitize(const Mat& m);
double op_norm(const Mat& m);
double trace_norm_hermitian(const Mat& m);
double max_abs(const Mat& m);

// f applied to a Hermitian matrix through its eigendecomposition
Mat herm_func(const Mat& h, const std::function<double(double)>& f);

// Full-rank state with cached spectral data.
class DensityMatrix {
 public:
  DensityMatrix(const Mat& rho, int n_sites, int d, double rank_tol = 1e-12);

  int n_sites() const { return n_sites_; }
  int local_dim() const { return d_; }
  long long dim() const { return matrix_.rows(); }
  const Mat& matrix() const { return matrix_; }
  const RVec& eigenvalues() const { return evals_; }
  const Mat& eigenvectors() const { return evecs_; }
  double min_eigenvalue() const { return evals_(0); }
  double max_eigenvalue() const { return evals_(evals_.size() - 1); }
  const Mat& sqrt() const { return sqrt_; }
  const Mat& inv_sqrt() const { return inv_sqrt_; }
  Mat inverse() const;
  Mat func(const std::function<double(double)>& f) const;
  // marginal on `keep` (the other sites are traced out)
  Mat marginal(const Sites& keep) const;

 private:
  Mat matrix_;
  RVec evals_;
  Mat evecs_;
  Mat sqrt_;
  Mat inv_sqrt_;
  int n_sites_;
  int d_;
};

cplx gns_inner(const DensityMatrix& sigma, const Mat& a, const Mat& b);

// Inverse of a positive definite Hermitian matrix through its spectrum.
Mat pd_inverse(const Mat& m, double rank_tol = 1e-12);
Mat pd_power(const Mat& m, double p, double rank_tol = 1e-12);

}  // namespace pgap
