#include "pgap/purified.hpp"

#include "pgap/rng.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace pgap {

Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvec(const Vec& v, long long dim) { return Eigen::Map<const Mat>(v.data(), dim, dim); }

Vec SuperOperator::apply_vec(const Vec& v) const { return vec(apply(unvec(v, dim))); }

LinearMap SuperOperator::as_linear_map() const {
  auto f = apply;
  const long long d = dim;
  return [f, d](const Vec& v) { return vec(f(unvec(v, d))); };
}

Mat SuperOperator::materialize() const {
  const long long n = vec_dim();
  Mat out(n, n);
  Mat e = Mat::Zero(dim, dim);
  for (long long j = 0; j < n; ++j) {
    e(j % dim, j / dim) = 1.0;
    out.col(j) = vec(apply(e));
    e(j % dim, j / dim) = 0.0;
  }
  return out;
}

namespace {

struct RegionCache {
  SplitIndex split;
  Mat inv_marginal;
};

RegionCache region_cache(const Mat& rho, int n, int d, const Sites& x) {
  const Sites all = all_sites(n);
  const Sites keep = region_minus(all, x);
  RegionCache c;
  c.split = split_index(all, keep, d);
  Mat marg = trace_rest(rho, c.split);
  c.inv_marginal = pd_inverse(marg, 1e-14);
  return c;
}

Mat apply_projection(const RegionCache& c, const Mat& sqrt_sigma, const Mat& q) {
  Mat p = q * sqrt_sigma;
  Mat y = embed_split(trace_rest(p, c.split) * c.inv_marginal, c.split);
  return y * sqrt_sigma;
}

}  // namespace

PurifiedContext::PurifiedContext(const DensityMatrix& sigma) : sigma_(&sigma) {
  auto data = std::make_shared<Data>();
  data->sqrt = sigma.sqrt();
  data->rho = sigma.matrix();
  data->n = sigma.n_sites();
  data->d = sigma.local_dim();
  for (int x = 0; x < data->n; ++x) {
    RegionCache c = region_cache(data->rho, data->n, data->d, {x});
    data->sites.push_back({std::move(c.split), std::move(c.inv_marginal)});
  }
  data_ = std::move(data);
}

Mat PurifiedContext::project(const Sites& x, const Mat& q) const {
  validate_region(x, data_->n);
  if (q.rows() != data_->sqrt.rows()) throw Error(ErrorKind::dimension, "operator must have full support");
  if (x.size() == 1) {
    const SiteCache& s = data_->sites[x[0]];
    return apply_projection({s.split, s.inv_marginal}, data_->sqrt, q);
  }
  return apply_projection(region_cache(data_->rho, data_->n, data_->d, x), data_->sqrt, q);
}

SuperOperator PurifiedContext::projector(const Sites& x) const {
  validate_region(x, data_->n);
  auto cache = std::make_shared<RegionCache>(region_cache(data_->rho, data_->n, data_->d, x));
  auto data = data_;
  SuperOperator op;
  op.dim = data->sqrt.rows();
  op.apply = [cache, data](const Mat& q) { return apply_projection(*cache, data->sqrt, q); };
  op.hs_hermitian = true;
  op.psd = true;
  return op;
}

SuperOperator PurifiedContext::hamiltonian(const Sites& x) const {
  validate_region(x, data_->n);
  auto data = data_;
  const Sites xs = x;
  SuperOperator op;
  op.dim = data->sqrt.rows();
  op.hs_hermitian = true;
  op.psd = true;
  if (xs.empty()) {
    op.apply = [](const Mat& q) { return Mat(Mat::Zero(q.rows(), q.cols())); };
    op.kernel_projector = [](const Mat& q) { return q; };
    op.kernel_dim = op.dim * op.dim;
    return op;
  }
  op.apply = [data, xs](const Mat& q) {
    Mat p = q * data->sqrt;
    Mat y = Mat::Zero(q.rows(), q.cols());
    for (int site : xs) {
      const SiteCache& s = data->sites[site];
      y += embed_split(trace_rest(p, s.split) * s.inv_marginal, s.split);
    }
    return Mat(static_cast<double>(xs.size()) * q - y * data->sqrt);
  };
  SuperOperator proj = projector(x);
  op.kernel_projector = proj.apply;
  op.kernel_dim = ipow(data->d, 2 * (data->n - static_cast<int>(x.size())));
  op.kernel.push_back(data->sqrt);
  return op;
}

Mat pi_project(const DensityMatrix& sigma, const Sites& x, const Mat& q) { return PurifiedContext(sigma).project(x, q); }

SuperOperator purified_hamiltonian(const DensityMatrix& sigma, const Sites& x) {
  return PurifiedContext(sigma).hamiltonian(x);
}

// ---------------------------------------------------------------- gaps

namespace {

GapResult dense_gap(const SuperOperator& h, const GapOptions& opts) {
  Mat m = hermitize(h.materialize());
  // eigenvectors triple the cost of a large solve; above this size the gap vector comes from inverse iteration
  const bool with_vectors = m.rows() <= 1024;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  GapResult r;
  r.method = "dense";
  r.norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double ktol = opts.kernel_rel_tol * std::max(r.norm, 1e-300);
  long long idx = -1;
  for (long long i = 0; i < ev.size(); ++i) {
    if (ev(i) < ktol) {
      ++r.kernel_dim;
      continue;
    }
    if (ev(i) < 10 * ktol) r.kernel_ambiguous = true;
    if (idx < 0) idx = i;
  }
  if (idx < 0) {
    r.gap = 0.0;
    return r;
  }
  r.gap = ev(idx);
  Vec v;
  if (with_vectors) {
    v = es.eigenvectors().col(idx);
  } else {
    const double shift = r.gap - 1e-9 * std::max(r.norm, 1.0);
    Eigen::PartialPivLU<Mat> lu(m - shift * Mat::Identity(m.rows(), m.cols()));
    CounterRng rng(opts.seed, 17);
    v = random_vector(rng, m.rows());
    for (int it = 0; it < 3; ++it) {
      v = lu.solve(v);
      v /= v.norm();
    }
  }
  r.residual = (m * v - r.gap * v).norm();
  return r;
}

GapResult iterative_gap(const SuperOperator& h, const GapOptions& opts) {
  const long long n = h.vec_dim();
  KrylovOptions ko;
  ko.tol = opts.tol;
  ko.seed = opts.seed;
  ko.max_basis = opts.max_basis;
  ko.keep = std::max(4, opts.max_basis / 3);
  ko.max_matvecs = opts.max_matvecs;
  if (h.kernel_projector) {
    auto kp = h.kernel_projector;
    const long long d = h.dim;
    ko.project = [kp, d](Vec& v) { v -= vec(kp(unvec(v, d))); };
  }
  for (const Mat& k : h.kernel) ko.deflate.push_back(vec(k));
  if (!h.kernel_projector && h.kernel.empty())
    throw Error(ErrorKind::contract, "iterative gap needs a kernel projector or kernel vectors");
  GapResult r;
  r.method = "deflated-iterative";
  KrylovResult kr = lowest_eigenpairs(h.as_linear_map(), n, ko);
  r.matvecs = kr.matvecs;
  if (!kr.converged)
    throw Error(ErrorKind::numerical, "iterative gap did not converge (residual " + std::to_string(kr.residuals(0)) + ")");
  r.gap = kr.values(0);
  r.residual = kr.residuals(0);
  r.kernel_dim = h.kernel_projector ? h.kernel_dim : static_cast<long long>(h.kernel.size());
  KrylovOptions no;
  no.tol = 1e-6;
  no.seed = opts.seed + 1;
  no.project = ko.project;
  no.deflate = ko.deflate;
  KrylovResult top = highest_eigenpairs(h.as_linear_map(), n, no);
  r.norm = top.values(0);
  r.matvecs += top.matvecs;
  const double ktol = opts.kernel_rel_tol * std::max(r.norm, 1e-300);
  if (r.gap < 10 * ktol) r.kernel_ambiguous = true;
  return r;
}

}  // namespace

GapResult spectral_gap(const SuperOperator& h, const GapOptions& opts) {
  if (!h.hs_hermitian) throw Error(ErrorKind::contract, "spectral gap needs an HS-Hermitian map");
  if (!opts.force_iterative && h.vec_dim() <= opts.dense_max) return dense_gap(h, opts);
  return iterative_gap(h, opts);
}

double martingale_defect(const DensityMatrix& sigma, const Sites& a, const Sites& b, const Sites& c,
                         std::uint64_t seed) {
  const int n = sigma.n_sites();
  for (const Sites* r : {&a, &b, &c}) validate_region(*r, n);
  if (!region_intersection(a, b).empty() || !region_intersection(b, c).empty() || !region_intersection(a, c).empty())
    throw Error(ErrorKind::partition, "regions A, B, C must be disjoint");
  PurifiedContext ctx(sigma);
  SuperOperator pab = ctx.projector(region_union(a, b));
  SuperOperator pbc = ctx.projector(region_union(b, c));
  SuperOperator pabc = ctx.projector(region_union(region_union(a, b), c));
  const long long d = sigma.dim();
  LinearMap m = [&](const Vec& v) {
    Mat q = unvec(v, d);
    return vec(pab.apply(pbc.apply(q)) - pabc.apply(q));
  };
  LinearMap madj = [&](const Vec& v) {
    Mat q = unvec(v, d);
    return vec(pbc.apply(pab.apply(q)) - pabc.apply(q));
  };
  NormResult nr = map_norm(m, madj, d * d, d * d, 1e-10, 3, seed);
  return nr.value;
}

// ---------------------------------------------------------------- eta

const char* eta_method_name(EtaMethod m) {
  switch (m) {
    case EtaMethod::trivial: return "trivial";
    case EtaMethod::gibbs_boundary: return "gibbs-boundary";
    case EtaMethod::closed_form: return "closed-form";
    case EtaMethod::heuristic: return "heuristic";
  }
  return "unknown";
}

double eta_from_witness(const DensityMatrix& sigma, const Sites& x, const Mat& q) {
  const int n = sigma.n_sites();
  validate_region(x, n);
  const Sites xc = complement(x, n);
  if (q.rows() != ipow(sigma.local_dim(), static_cast<int>(xc.size())))
    throw Error(ErrorKind::dimension, "witness must act on the complement of X");
  Eigen::FullPivLU<Mat> lu(q);
  if (!lu.isInvertible()) throw Error(ErrorKind::rank, "witness is not invertible");
  const Sites all = all_sites(n);
  Mat qf = xc.empty() ? Mat(q(0, 0) * identity(sigma.dim())) : embed(q, xc, all, sigma.local_dim());
  Mat qi = lu.inverse();
  Mat qif = xc.empty() ? Mat(qi(0, 0) * identity(sigma.dim())) : embed(qi, xc, all, sigma.local_dim());
  return op_norm(qf * sigma.inv_sqrt()) * op_norm(sigma.sqrt() * qif);
}

EtaBound eta_trivial(const DensityMatrix& sigma) {
  EtaBound e;
  e.method = EtaMethod::trivial;
  e.value = std::sqrt(sigma.max_eigenvalue() / sigma.min_eigenvalue());
  return e;
}

EtaBound eta_gibbs_boundary(const DensityMatrix& sigma, const Interaction& phi, double beta, const Sites& x) {
  const int n = sigma.n_sites();
  if (phi.lattice.site_count() != n) throw Error(ErrorKind::dimension, "interaction and state disagree on the lattice");
  const Sites xc = complement(x, n);
  Mat q = xc.empty() ? identity(1) : herm_func(phi.hamiltonian_on(xc), [beta](double e) { return std::exp(-0.5 * beta * e); });
  EtaBound e;
  e.method = EtaMethod::gibbs_boundary;
  e.value = eta_from_witness(sigma, x, q);
  e.witness = q;
  return e;
}

EtaBound eta_closed_form(const Interaction& phi, double beta, const Sites& x) {
  EtaBound e;
  e.method = EtaMethod::closed_form;
  e.value = std::exp(beta * static_cast<double>(x.size()) * phi.strength());
  return e;
}

EtaBound eta_refine(const DensityMatrix& sigma, const Sites& x, const EtaBound& start, int iterations,
                    std::uint64_t seed) {
  const Sites xc = complement(x, sigma.n_sites());
  const long long dim = ipow(sigma.local_dim(), static_cast<int>(xc.size()));
  Mat q = start.witness ? *start.witness : identity(dim);
  double best = eta_from_witness(sigma, x, q);
  CounterRng rng(seed, 3);
  double step = 0.1;
  for (int it = 0; it < iterations; ++it) {
    Mat k = random_hermitian(rng, dim);
    k *= step / std::max(op_norm(k), 1e-300);
    Mat trial = Mat(k.exp()) * q;
    const double val = eta_from_witness(sigma, x, trial);
    if (val < best) {
      best = val;
      q = trial;
      step *= 1.2;
    } else {
      step *= 0.9;
    }
  }
  EtaBound e;
  e.method = EtaMethod::heuristic;
  e.value = best;
  e.witness = q;
  return e;
}

double small_region_gap_bound(const EtaBound& eta) {
  if (eta.value < 1.0 - 1e-12) throw Error(ErrorKind::domain, "eta must be at least one");
  return std::pow(eta.value, -4.0);
}

}  // namespace pgap
