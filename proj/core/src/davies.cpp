#include "pgap/davies.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>

namespace pgap {

Mat BohrDecomposition::reconstruct() const {
  if (components.empty()) return Mat();
  Mat s = Mat::Zero(components[0].rows(), components[0].cols());
  for (const Mat& c : components) s += c;
  return s;
}

BohrDecomposition bohr_decompose(const Mat& h, const Mat& s, double freq_tol) {
  if (!is_hermitian(h, 1e-10)) throw Error(ErrorKind::model, "Bohr decomposition needs a Hermitian H");
  if (s.rows() != h.rows() || s.cols() != h.cols()) throw Error(ErrorKind::dimension, "S and H sizes differ");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  const RVec& e = es.eigenvalues();
  const Mat& u = es.eigenvectors();
  const long long n = e.size();
  const double scale = std::max(std::abs(e(0)), std::abs(e(n - 1)));
  const double tol = freq_tol < 0 ? 1e-8 * std::max(scale, 1e-300) : freq_tol;

  // energy levels: clusters of eigenvalues closer than tol
  std::vector<int> level(n);
  std::vector<double> level_value;
  std::vector<int> level_count;
  for (long long i = 0; i < n; ++i) {
    if (i == 0 || e(i) - e(i - 1) > tol) {
      level_value.push_back(0.0);
      level_count.push_back(0);
    }
    level[i] = static_cast<int>(level_value.size()) - 1;
    level_value.back() += e(i);
    level_count.back() += 1;
  }
  for (size_t l = 0; l < level_value.size(); ++l) level_value[l] /= level_count[l];

  // S(omega) collects <i|S|j> with omega = E_j - E_i
  const Mat sp = u.adjoint() * s * u;
  std::vector<double> diffs;
  for (size_t a = 0; a < level_value.size(); ++a)
    for (size_t b = 0; b < level_value.size(); ++b) diffs.push_back(level_value[b] - level_value[a]);
  std::sort(diffs.begin(), diffs.end());
  std::vector<double> freqs;
  for (double w : diffs)
    if (freqs.empty() || w - freqs.back() > tol) freqs.push_back(w);
  auto freq_index = [&](double w) {
    auto it = std::lower_bound(freqs.begin(), freqs.end(), w - tol);
    return static_cast<int>(it - freqs.begin());
  };
  std::vector<Mat> parts(freqs.size(), Mat::Zero(n, n));
  for (long long j = 0; j < n; ++j)
    for (long long i = 0; i < n; ++i) {
      if (sp(i, j) == cplx(0.0)) continue;
      const double w = level_value[level[j]] - level_value[level[i]];
      parts[freq_index(w)](i, j) = sp(i, j);
    }
  BohrDecomposition out;
  const double snorm = max_abs(sp);
  for (size_t k = 0; k < freqs.size(); ++k) {
    if (max_abs(parts[k]) <= 1e-14 * std::max(snorm, 1e-300)) continue;
    out.frequencies.push_back(std::abs(freqs[k]) <= tol ? 0.0 : freqs[k]);
    out.components.push_back(u * parts[k] * u.adjoint());
  }
  return out;
}

std::vector<Mat> default_couplings(int d) {
  std::vector<Mat> out;
  std::vector<Mat> basis = single_site_basis(d);
  for (size_t i = 1; i < basis.size(); ++i) out.push_back(basis[i] / op_norm(basis[i]));
  return out;
}

RateProfile rate_profile_from_name(const std::string& name) {
  if (name == "glauber") return RateProfile::glauber;
  if (name == "sqrt") return RateProfile::sqrt;
  throw Error(ErrorKind::parameter, "unknown rate profile '" + name + "'");
}

const char* rate_profile_name(RateProfile p) { return p == RateProfile::glauber ? "glauber" : "sqrt"; }

std::function<double(double)> rate_profile(RateProfile p, double beta) {
  if (beta < 0) throw Error(ErrorKind::parameter, "beta must be nonnegative");
  if (p == RateProfile::glauber) return [beta](double w) { return std::min(1.0, std::exp(beta * w)); };
  return [beta](double w) { return std::exp(0.5 * beta * w); };
}

Mat sandwich_matrix(const Mat& a, const Mat& b) { return kron(b.transpose(), a); }

Mat lindblad_term(const Mat& s) {
  const Mat sds = s.adjoint() * s;
  const Mat id = identity(s.rows());
  return sandwich_matrix(s.adjoint(), s) - 0.5 * (sandwich_matrix(sds, id) + sandwich_matrix(id, sds));
}

DaviesGenerator build_davies(const Interaction& phi, double beta, std::vector<std::vector<Mat>> couplings,
                             RateProfile profile) {
  const int n = phi.lattice.site_count();
  const int d = phi.lattice.d;
  const long long dim = phi.lattice.dim();
  if (dim * dim > kDenseGeneratorDim) throw Error(ErrorKind::capacity, "generator dimension over dense threshold");
  if (!phi.check_commuting()) throw Error(ErrorKind::capability, "Davies generators are built for commuting interactions only");
  if (couplings.empty()) couplings.assign(n, default_couplings(d));
  if (static_cast<int>(couplings.size()) != n) throw Error(ErrorKind::parameter, "one coupling family per site expected");

  DaviesGenerator g;
  g.h = phi.hamiltonian();
  g.beta = beta;
  g.n_sites = n;
  g.d = d;
  g.profile = profile;
  g.couplings = couplings;
  auto rate = rate_profile(profile, beta);
  const Sites all = all_sites(n);
  const Mat id = identity(dim);
  g.dissipator = Mat::Zero(dim * dim, dim * dim);
  for (int x = 0; x < n; ++x) {
    const Sites cl = phi.closure({x});
    const Mat hx = phi.boundary_hamiltonian({x});
    Mat dx = Mat::Zero(dim * dim, dim * dim);
    for (int alpha = 0; alpha < static_cast<int>(couplings[x].size()); ++alpha) {
      const Mat& s = couplings[x][alpha];
      if (s.rows() != d) throw Error(ErrorKind::dimension, "couplings must be single-site operators");
      BohrDecomposition bd = bohr_decompose(hx, embed(s, {x}, cl, d));
      for (size_t k = 0; k < bd.frequencies.size(); ++k) {
        const double w = bd.frequencies[k];
        if (w < 0) continue;
        const Mat sw = embed(bd.components[k], cl, all, d);
        Jump j;
        j.site = x;
        j.alpha = alpha;
        j.omega = w;
        j.v = std::sqrt(rate(w)) * sw;
        if (w > 0) {
          j.v_partner = std::sqrt(rate(-w)) * Mat(sw.adjoint());
          j.dissipator = lindblad_term(j.v) + lindblad_term(j.v_partner);
        } else {
          j.dissipator = lindblad_term(j.v);
        }
        dx += j.dissipator;
        g.jumps.push_back(std::move(j));
      }
    }
    g.dissipator += dx;
    g.site_dissipators.push_back(std::move(dx));
  }
  const cplx i1(0.0, 1.0);
  g.generator = i1 * (sandwich_matrix(g.h, id) - sandwich_matrix(id, g.h)) + g.dissipator;
  return g;
}

double db_defect(const Mat& d, const DensityMatrix& sigma) {
  const double nd = op_norm(d);
  if (nd == 0.0) return 0.0;
  const Mat gamma = sandwich_matrix(identity(sigma.dim()), sigma.matrix());
  return op_norm(gamma * d - d.adjoint() * gamma) / nd;
}

Mat purified_dissipator(const Mat& d, const DensityMatrix& sigma, double reversibility_tol) {
  const double defect = db_defect(d, sigma);
  if (defect > reversibility_tol) throw Error(ErrorKind::contract, "dissipator is not GNS-reversible (defect " + std::to_string(defect) + ")");
  const Mat id = identity(sigma.dim());
  const Mat g_half = sandwich_matrix(id, sigma.sqrt());
  const Mat g_inv_half = sandwich_matrix(id, sigma.inv_sqrt());
  return -(g_half * d * g_inv_half);
}

SuperOperator as_super_operator(const Mat& dense, long long dim, bool hs_hermitian, bool psd) {
  auto m = std::make_shared<Mat>(dense);
  SuperOperator op;
  op.dim = dim;
  op.apply = [m, dim](const Mat& q) { return unvec(*m * vec(q), dim); };
  op.hs_hermitian = hs_hermitian;
  op.psd = psd;
  return op;
}

long long kernel_dimension(const Mat& m, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(m);
  const RVec& sv = svd.singularValues();
  const double tol = rel_tol * std::max(sv(0), 1e-300);
  long long k = 0;
  for (long long i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol) ++k;
  return k + (m.cols() - sv.size());
}

long long commutant_dimension(const std::vector<Mat>& ops, double rel_tol) {
  if (ops.empty()) throw Error(ErrorKind::parameter, "commutant of an empty family");
  const long long dim = ops[0].rows();
  const Mat id = identity(dim);
  Mat stack(static_cast<long long>(ops.size()) * dim * dim, dim * dim);
  for (size_t i = 0; i < ops.size(); ++i)
    stack.middleRows(static_cast<long long>(i) * dim * dim, dim * dim) = sandwich_matrix(ops[i], id) - sandwich_matrix(id, ops[i]);
  Mat gram = stack.adjoint() * stack;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(gram), Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  const double tol = rel_tol * std::max(ev(ev.size() - 1), 1e-300);
  long long k = 0;
  for (long long i = 0; i < ev.size(); ++i)
    if (ev(i) <= tol) ++k;
  return k;
}

PrimitivityResult local_primitivity_check(const Mat& d_x, const DensityMatrix& sigma, int site, double kernel_rel_tol) {
  const long long dim = sigma.dim();
  if (dim * dim > kDenseGeneratorDim) throw Error(ErrorKind::capacity, "primitivity check over dense threshold");
  const Mat p = purified_dissipator(d_x, sigma);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(p));
  const RVec& ev = es.eigenvalues();
  const double tol = kernel_rel_tol * std::max(std::abs(ev(ev.size() - 1)), 1e-300);
  PrimitivityResult r;
  r.primitive = true;
  const int n = sigma.n_sites(), d = sigma.local_dim();
  const Sites all = all_sites(n);
  const Sites rest = complement({site}, n);
  for (long long i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > tol) continue;
    const Mat o = unvec(es.eigenvectors().col(i), dim) * sigma.inv_sqrt();
    const Mat reduced = partial_trace(o, all, {site}, d) / static_cast<double>(d);
    const Mat back = rest.empty() ? Mat(reduced(0, 0) * identity(dim)) : embed(reduced, rest, all, d);
    const double res = op_norm(o - back) / std::max(op_norm(o), 1e-300);
    r.worst_residual = std::max(r.worst_residual, res);
    if (res > 1e-8) r.primitive = false;
    r.kernel.push_back(o);
  }
  return r;
}

DissipatorGaps dissipator_gaps(const DaviesGenerator& g, const DensityMatrix& sigma) {
  DissipatorGaps out;
  const long long dim = sigma.dim();
  GapOptions opts;
  opts.dense_max = kDenseGeneratorDim;
  out.min_site_gap = std::numeric_limits<double>::infinity();
  for (const Mat& dx : g.site_dissipators) {
    GapResult r = spectral_gap(as_super_operator(purified_dissipator(dx, sigma), dim, true, true), opts);
    out.site_gaps.push_back(r.gap);
    out.min_site_gap = std::min(out.min_site_gap, r.gap);
  }
  out.global_gap = spectral_gap(as_super_operator(purified_dissipator(g.dissipator, sigma), dim, true, true), opts).gap;
  out.purified_gap = spectral_gap(purified_hamiltonian(sigma, all_sites(sigma.n_sites())), opts).gap;
  out.margin = out.global_gap - out.min_site_gap * out.purified_gap;
  return out;
}

std::vector<TrajectoryPoint> evolve(const DaviesGenerator& g, const DensityMatrix& sigma, const Mat& rho0,
                                    const std::vector<double>& times, double gap) {
  const long long dim = sigma.dim();
  const Mat ls = g.generator_dual();
  const Vec r0 = vec(rho0);
  std::vector<TrajectoryPoint> out;
  for (double t : times) {
    Mat prop = (t * ls).exp();
    if (!prop.allFinite()) throw Error(ErrorKind::numerical, "matrix exponential did not converge");
    Mat rho = unvec(prop * r0, dim);
    TrajectoryPoint p;
    p.t = t;
    p.trace_error = std::abs(rho.trace() - cplx(1.0));
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(rho), Eigen::EigenvaluesOnly);
    p.min_eigenvalue = es.eigenvalues()(0);
    p.distance = trace_norm_hermitian(rho - sigma.matrix());
    p.bound = std::exp(-t * gap) / std::sqrt(sigma.min_eigenvalue());
    out.push_back(p);
  }
  return out;
}

}  // namespace pgap
