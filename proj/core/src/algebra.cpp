#include "pgap/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pgap {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::region: return "region";
    case ErrorKind::rank: return "rank";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::capability: return "capability";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::partition: return "partition";
    case ErrorKind::domain: return "domain";
    case ErrorKind::contract: return "contract";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::model: return "model";
    case ErrorKind::interval: return "interval";
  }
  return "unknown";
}

// ---------------------------------------------------------------- lattice

Lattice Lattice::ring(int n, int d) {
  if (n < 1) throw Error(ErrorKind::parameter, "ring extent must be positive");
  if (d < 2) throw Error(ErrorKind::parameter, "local dimension must be at least 2");
  return Lattice{Kind::ring, n, d};
}

Lattice Lattice::torus(int n, int d) {
  if (n < 2) throw Error(ErrorKind::parameter, "torus extent must be at least 2");
  if (d < 1) throw Error(ErrorKind::parameter, "local dimension must be positive");
  return Lattice{Kind::torus_edges, n, d};
}

int Lattice::site_count() const { return kind == Kind::ring ? n : 2 * n * n; }

long long Lattice::dim() const {
  double logd = site_count() * std::log2(static_cast<double>(d));
  if (logd > 62) throw Error(ErrorKind::capacity, "Hilbert space dimension overflows");
  return ipow(d, site_count());
}

static int wrap(int a, int n) { return ((a % n) + n) % n; }

int Lattice::edge(int x, int y, int orient) const {
  if (kind != Kind::torus_edges) throw Error(ErrorKind::geometry, "edge() needs a torus lattice");
  return (wrap(x, n) * n + wrap(y, n)) * 2 + orient;
}

std::array<int, 4> Lattice::star(int vertex) const {
  if (kind != Kind::torus_edges) throw Error(ErrorKind::geometry, "stars need a torus lattice");
  int x = vertex / n, y = vertex % n;
  return {edge(x, y, 1), edge(x - 1, y, 0), edge(x, y - 1, 1), edge(x, y, 0)};
}

std::array<bool, 4> Lattice::star_outgoing() { return {false, true, true, false}; }

std::array<int, 4> Lattice::plaquette(int face) const {
  if (kind != Kind::torus_edges) throw Error(ErrorKind::geometry, "plaquettes need a torus lattice");
  int x = face / n, y = face % n;
  return {edge(x, y + 1, 0), edge(x, y, 1), edge(x, y, 0), edge(x + 1, y, 1)};
}

std::vector<int> Lattice::stars_of_edge(int e) const {
  std::vector<int> out;
  for (int v = 0; v < vertex_count(); ++v) {
    auto s = star(v);
    if (std::find(s.begin(), s.end(), e) != s.end()) out.push_back(v);
  }
  return out;
}

std::vector<int> Lattice::plaquettes_of_edge(int e) const {
  std::vector<int> out;
  for (int f = 0; f < face_count(); ++f) {
    auto p = plaquette(f);
    if (std::find(p.begin(), p.end(), e) != p.end()) out.push_back(f);
  }
  return out;
}

std::string Lattice::describe() const {
  std::ostringstream os;
  os << (kind == Kind::ring ? "ring" : "torus_edges") << "(n=" << n << ",d=" << d << ")";
  return os.str();
}

// ---------------------------------------------------------------- regions

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void validate_region(const Sites& r, int site_count) {
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0 || r[i] >= site_count)
      throw Error(ErrorKind::region, "site " + std::to_string(r[i]) + " out of range");
    if (i > 0 && r[i] <= r[i - 1]) throw Error(ErrorKind::region, "sites must be strictly increasing");
  }
}

Sites normalize_region(Sites r) {
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

Sites all_sites(int site_count) {
  Sites s(site_count);
  for (int i = 0; i < site_count; ++i) s[i] = i;
  return s;
}

Sites complement(const Sites& r, int site_count) { return region_minus(all_sites(site_count), r); }

Sites region_union(const Sites& a, const Sites& b) {
  Sites out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Sites region_intersection(const Sites& a, const Sites& b) {
  Sites out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Sites region_minus(const Sites& a, const Sites& b) {
  Sites out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const Sites& a, const Sites& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

// ---------------------------------------------------------------- index maps

SplitIndex split_index(const Sites& sup, const Sites& sub, int d) {
  if (!is_subset(sub, sup)) throw Error(ErrorKind::region, "sub-region not contained in support");
  const int k = static_cast<int>(sup.size());
  std::vector<int> is_sub(k, 0);
  for (int i = 0; i < k; ++i) is_sub[i] = std::binary_search(sub.begin(), sub.end(), sup[i]) ? 1 : 0;
  SplitIndex s;
  s.sub_dim = static_cast<int>(ipow(d, static_cast<int>(sub.size())));
  s.rest_dim = static_cast<int>(ipow(d, k - static_cast<int>(sub.size())));
  s.table.assign(static_cast<size_t>(s.sub_dim) * s.rest_dim, 0);
  const int total = s.sub_dim * s.rest_dim;
  for (int full = 0; full < total; ++full) {
    int a = 0, b = 0, rem = full;
    std::vector<int> digits(k);
    for (int i = k - 1; i >= 0; --i) {
      digits[i] = rem % d;
      rem /= d;
    }
    for (int i = 0; i < k; ++i) {
      if (is_sub[i]) a = a * d + digits[i];
      else b = b * d + digits[i];
    }
    s.table[static_cast<size_t>(a) * s.rest_dim + b] = full;
  }
  return s;
}

Mat trace_rest(const Mat& m, const SplitIndex& s) {
  Mat out = Mat::Zero(s.sub_dim, s.sub_dim);
  for (int a2 = 0; a2 < s.sub_dim; ++a2)
    for (int a1 = 0; a1 < s.sub_dim; ++a1) {
      cplx acc = 0;
      for (int b = 0; b < s.rest_dim; ++b) acc += m(s(a1, b), s(a2, b));
      out(a1, a2) = acc;
    }
  return out;
}

Mat embed_split(const Mat& m, const SplitIndex& s) {
  const int dim = s.sub_dim * s.rest_dim;
  Mat out = Mat::Zero(dim, dim);
  for (int b = 0; b < s.rest_dim; ++b)
    for (int a2 = 0; a2 < s.sub_dim; ++a2) {
      const int col = s(a2, b);
      for (int a1 = 0; a1 < s.sub_dim; ++a1) out(s(a1, b), col) = m(a1, a2);
    }
  return out;
}

Mat embed(const Mat& m, const Sites& support, const Sites& target, int d) {
  if (!is_subset(support, target)) throw Error(ErrorKind::dimension, "support not contained in embedding target");
  if (m.rows() != ipow(d, static_cast<int>(support.size())) || m.cols() != m.rows())
    throw Error(ErrorKind::dimension, "operator dimension does not match its support");
  if (support == target) return m;
  SplitIndex s = split_index(target, support, d);
  Mat out = Mat::Zero(s.sub_dim * s.rest_dim, s.sub_dim * s.rest_dim);
  for (int b = 0; b < s.rest_dim; ++b)
    for (int a2 = 0; a2 < s.sub_dim; ++a2) {
      const int col = s(a2, b);
      for (int a1 = 0; a1 < s.sub_dim; ++a1) out(s(a1, b), col) = m(a1, a2);
    }
  return out;
}

Operator embed(const Operator& op, const Sites& target, int d) { return {target, embed(op.m, op.support, target, d)}; }

Mat partial_trace(const Mat& m, const Sites& support, const Sites& traced, int d) {
  if (!is_subset(traced, support)) throw Error(ErrorKind::region, "traced region not contained in support");
  if (m.rows() != ipow(d, static_cast<int>(support.size())))
    throw Error(ErrorKind::dimension, "operator dimension does not match its support");
  if (traced.empty()) return m;
  Sites keep = region_minus(support, traced);
  SplitIndex s = split_index(support, keep, d);
  Mat out = Mat::Zero(s.sub_dim, s.sub_dim);
  for (int a2 = 0; a2 < s.sub_dim; ++a2)
    for (int a1 = 0; a1 < s.sub_dim; ++a1) {
      cplx acc = 0;
      for (int r = 0; r < s.rest_dim; ++r) acc += m(s(a1, r), s(a2, r));
      out(a1, a2) = acc;
    }
  return out;
}

Operator partial_trace(const Operator& op, const Sites& traced, int d) {
  return {region_minus(op.support, traced), partial_trace(op.m, op.support, traced, d)};
}

// ---------------------------------------------------------------- inner products

cplx hs_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::dimension, "hs_inner size mismatch");
  return (a.array().conjugate() * b.array()).sum();
}

cplx hs_inner(const Operator& a, const Operator& b) {
  if (a.support != b.support) throw Error(ErrorKind::dimension, "hs_inner support mismatch");
  return hs_inner(a.m, b.m);
}

cplx gns_inner(const DensityMatrix& sigma, const Mat& a, const Mat& b) {
  if (a.rows() != sigma.dim() || b.rows() != sigma.dim())
    throw Error(ErrorKind::dimension, "gns_inner needs full-lattice operators");
  // Tr(sigma A^dag B) = <A, B sigma>_HS
  return hs_inner(a, b * sigma.matrix());
}

// ---------------------------------------------------------------- bases

std::vector<Mat> single_site_basis(int d) {
  std::vector<Mat> out;
  const double s2 = 1.0 / std::sqrt(2.0);
  out.push_back(Mat::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Mat sym = Mat::Zero(d, d);
      sym(j, k) = sym(k, j) = s2;
      out.push_back(sym);
      Mat anti = Mat::Zero(d, d);
      anti(j, k) = cplx(0, -s2);
      anti(k, j) = cplx(0, s2);
      out.push_back(anti);
    }
  for (int l = 1; l < d; ++l) {
    Mat diag = Mat::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) diag(j, j) = norm;
    diag(l, l) = -l * norm;
    out.push_back(diag);
  }
  // for d = 2 the order above is I, X, Y, Z (all divided by sqrt 2)
  return out;
}

std::vector<Mat> herm_basis(int k, int d) {
  std::vector<Mat> single = single_site_basis(d);
  std::vector<Mat> out{Mat::Identity(1, 1)};
  for (int site = 0; site < k; ++site) {
    std::vector<Mat> next;
    next.reserve(out.size() * single.size());
    for (const Mat& a : out)
      for (const Mat& b : single) next.push_back(kron(a, b));
    out = std::move(next);
  }
  return out;
}

std::vector<Operator> herm_basis(const Sites& region, int d) {
  std::vector<Operator> out;
  for (Mat& m : herm_basis(static_cast<int>(region.size()), d)) out.push_back({region, std::move(m)});
  return out;
}

// ---------------------------------------------------------------- small utilities

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat identity(long long dim) { return Mat::Identity(dim, dim); }

Mat pauli(char which) {
  Mat m = Mat::Zero(2, 2);
  switch (which) {
    case 'I': m(0, 0) = m(1, 1) = 1; break;
    case 'X': m(0, 1) = m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw Error(ErrorKind::parameter, std::string("unknown Pauli ") + which);
  }
  return m;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Mat& m, double rtol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(op_norm(m), 1e-300);
  return op_norm(m - m.adjoint()) <= rtol * scale;
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * (1 + m.cwiseAbs().maxCoeff())) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double trace_norm_hermitian(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

Mat herm_func(const Mat& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  RVec fv = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

Mat pd_power(const Mat& m, double p, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
  const RVec& ev = es.eigenvalues();
  if (ev(ev.size() - 1) <= 0 || ev(0) <= rank_tol * ev(ev.size() - 1))
    throw Error(ErrorKind::rank, "matrix is not positive definite within rank tolerance");
  RVec fv = ev.unaryExpr([p](double x) { return std::pow(x, p); });
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

Mat pd_inverse(const Mat& m, double rank_tol) { return pd_power(m, -1.0, rank_tol); }

// ---------------------------------------------------------------- density matrix

DensityMatrix::DensityMatrix(const Mat& rho, int n_sites, int d, double rank_tol) : n_sites_(n_sites), d_(d) {
  if (rho.rows() != rho.cols() || rho.rows() != ipow(d, n_sites))
    throw Error(ErrorKind::dimension, "density matrix size does not match the lattice");
  matrix_ = hermitize(rho);
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix_);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  const double top = evals_(evals_.size() - 1);
  if (!(top > 0) || evals_(0) <= rank_tol * top)
    throw Error(ErrorKind::rank, "state is not full rank (min eigenvalue " + std::to_string(evals_(0)) + ")");
  if (std::abs(evals_.sum() - 1.0) > 1e-12 * std::max(1.0, static_cast<double>(evals_.size())) &&
      std::abs(evals_.sum() - 1.0) > 1e-10)
    throw Error(ErrorKind::rank, "state trace differs from one");
  RVec s = evals_.cwiseSqrt();
  sqrt_ = evecs_ * s.asDiagonal() * evecs_.adjoint();
  inv_sqrt_ = evecs_ * s.cwiseInverse().asDiagonal() * evecs_.adjoint();
}

Mat DensityMatrix::inverse() const { return evecs_ * evals_.cwiseInverse().asDiagonal() * evecs_.adjoint(); }

Mat DensityMatrix::func(const std::function<double(double)>& f) const {
  RVec fv = evals_.unaryExpr(f);
  return evecs_ * fv.asDiagonal() * evecs_.adjoint();
}

Mat DensityMatrix::marginal(const Sites& keep) const {
  Sites all = all_sites(n_sites_);
  return partial_trace(matrix_, all, region_minus(all, keep), d_);
}

}  // namespace pgap
