#include "pgap/krylov.hpp"

#include "pgap/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pgap {

namespace {

struct Basis {
  Mat v;
  Mat av;
  int size = 0;
};

// Orthogonalize w against the deflation set and the first `size` columns of v (twice).
double orthogonalize(Vec& w, const Mat& v, int size, const std::vector<Vec>& deflate, const Projector& project) {
  for (int pass = 0; pass < 2; ++pass) {
    if (project && pass == 0) project(w);
    for (const Vec& q : deflate) w -= q * q.dot(w);
    if (size > 0) w -= v.leftCols(size) * (v.leftCols(size).adjoint() * w);
  }
  return w.norm();
}

KrylovResult run(const LinearMap& a, long long n, const KrylovOptions& opts, double sign) {
  if (n <= 0) throw Error(ErrorKind::dimension, "empty Krylov problem");
  std::vector<Vec> deflate;
  for (const Vec& q : opts.deflate) {
    Vec w = q;
    for (const Vec& p : deflate) w -= p * p.dot(w);
    for (const Vec& p : deflate) w -= p * p.dot(w);
    if (w.norm() > 1e-12 * std::max(1.0, q.norm())) deflate.push_back(w / w.norm());
  }
  const long long avail = n - static_cast<long long>(deflate.size());
  const int nev = opts.nev;
  if (nev < 1 || nev > avail) throw Error(ErrorKind::parameter, "invalid number of requested eigenpairs");
  const int m = static_cast<int>(std::min<long long>(std::max(opts.max_basis, nev + 2), avail));
  const int keep = std::clamp(opts.keep, nev, std::max(nev, m - 2));

  CounterRng rng(opts.seed, 17);
  Basis b;
  b.v.resize(n, m);
  b.av.resize(n, m);

  auto apply = [&](const Vec& x) {
    Vec y = a(x);
    if (opts.project) opts.project(y);
    return Vec(sign * y);
  };

  KrylovResult res;
  Vec next = random_vector(rng, n);
  int stalls = 0;
  bool exhausted = false;
  Mat t = Mat::Zero(m, m);

  while (true) {
    double nrm = orthogonalize(next, b.v, b.size, deflate, opts.project);
    while (nrm < 1e-10) {
      if (++stalls > 8) {
        exhausted = true;
        break;
      }
      next = random_vector(rng, n);
      nrm = orthogonalize(next, b.v, b.size, deflate, opts.project);
    }
    if (!exhausted) {
      b.v.col(b.size) = next / nrm;
      b.av.col(b.size) = apply(b.v.col(b.size));
      ++res.matvecs;
      const int j = b.size;
      ++b.size;
      Vec col = b.v.leftCols(b.size).adjoint() * b.av.col(j);
      t.col(j).head(b.size) = col;
      t.row(j).head(b.size) = col.adjoint();
      t(j, j) = col(j).real();
    }
    if (b.size < nev && !exhausted) {
      next = b.av.col(b.size - 1);
      continue;
    }

    Mat tk = t.topLeftCorner(b.size, b.size);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (tk + tk.adjoint()));
    const RVec& theta = es.eigenvalues();
    const Mat& y = es.eigenvectors();
    const int nv = std::min(nev, b.size);

    RVec resid(nv);
    int first_bad = -1;
    Vec first_r;
    for (int i = 0; i < nv; ++i) {
      Vec x = b.v.leftCols(b.size) * y.col(i);
      Vec r = b.av.leftCols(b.size) * y.col(i) - theta(i) * x;
      resid(i) = r.norm();
      if (resid(i) > opts.tol && first_bad < 0) {
        first_bad = i;
        first_r = r;
      }
    }
    if (first_bad < 0 || exhausted || res.matvecs >= opts.max_matvecs) {
      res.converged = first_bad < 0 || exhausted;
      res.values = sign * theta.head(nv);
      res.vectors = b.v.leftCols(b.size) * y.leftCols(nv);
      res.residuals = resid;
      return res;
    }
    if (b.size == m) {
      Mat vk = b.v.leftCols(b.size) * y.leftCols(keep);
      Mat avk = b.av.leftCols(b.size) * y.leftCols(keep);
      b.v.leftCols(keep) = vk;
      b.av.leftCols(keep) = avk;
      b.size = keep;
      t.setZero();
      for (int i = 0; i < keep; ++i) t(i, i) = theta(i);
    }
    next = first_r;
  }
}

}  // namespace

KrylovResult lowest_eigenpairs(const LinearMap& a, long long n, const KrylovOptions& opts) { return run(a, n, opts, 1.0); }

KrylovResult highest_eigenpairs(const LinearMap& a, long long n, const KrylovOptions& opts) { return run(a, n, opts, -1.0); }

NormResult map_norm(const LinearMap& t, const LinearMap& t_adj, long long n_in, long long n_out, double tol,
                    int restarts, std::uint64_t seed) {
  const long long n = n_in + n_out;
  LinearMap dilation = [&](const Vec& x) {
    Vec y(n);
    y.head(n_out) = t(x.tail(n_in));
    y.tail(n_in) = t_adj(x.head(n_out));
    return y;
  };
  NormResult best;
  best.value = -1.0;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KrylovOptions opts;
    opts.tol = tol;
    opts.seed = seed + 7919ULL * r;
    opts.max_basis = static_cast<int>(std::min<long long>(60, n));
    opts.keep = std::min(20, opts.max_basis - 1);
    KrylovResult kr = highest_eigenpairs(dilation, n, opts);
    best.matvecs += kr.matvecs;
    const double val = std::max(0.0, kr.values(0));
    if (val > best.value) {
      best.value = val;
      best.residual = kr.residuals(0);
      best.converged = kr.converged;
      Vec x = kr.vectors.col(0);
      best.left = x.head(n_out);
      best.right = x.tail(n_in);
      const double nl = best.left.norm(), nr = best.right.norm();
      if (nl > 0) best.left /= nl;
      if (nr > 0) best.right /= nr;
    }
  }
  return best;
}

Mat materialize(const LinearMap& a, long long n_in, long long n_out) {
  Mat out(n_out, n_in);
  Vec e = Vec::Zero(n_in);
  for (long long j = 0; j < n_in; ++j) {
    e(j) = 1.0;
    out.col(j) = a(e);
    e(j) = 0.0;
  }
  return out;
}

}  // namespace pgap
