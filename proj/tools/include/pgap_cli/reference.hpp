#pragma once

// Brute-force reference implementations. They are written from the definitions with
// explicit index loops and share no code paths with the library beyond basic types.

#include "pgap/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using pgap::cplx;
using pgap::Mat;
using pgap::Sites;

// digits of a basis index for a list of sites, most significant first
inline std::vector<int> digits(long long idx, int count, int d) {
  std::vector<int> out(count);
  for (int k = count - 1; k >= 0; --k) {
    out[k] = static_cast<int>(idx % d);
    idx /= d;
  }
  return out;
}

inline long long index_of(const std::vector<int>& dig, int d) {
  long long idx = 0;
  for (int v : dig) idx = idx * d + v;
  return idx;
}

inline long long power(int d, int k) {
  long long r = 1;
  for (int i = 0; i < k; ++i) r *= d;
  return r;
}

inline int position(const Sites& s, int site) {
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == site) return static_cast<int>(i);
  return -1;
}

// m on `support` tensored with identity on target \ support
inline Mat embed(const Mat& m, const Sites& support, const Sites& target, int d) {
  const long long dim = power(d, static_cast<int>(target.size()));
  Mat out = Mat::Zero(dim, dim);
  for (long long i = 0; i < dim; ++i) {
    const auto di = digits(i, static_cast<int>(target.size()), d);
    for (long long j = 0; j < dim; ++j) {
      const auto dj = digits(j, static_cast<int>(target.size()), d);
      bool same_rest = true;
      std::vector<int> si, sj;
      for (size_t k = 0; k < target.size(); ++k) {
        if (position(support, target[k]) >= 0) {
          si.push_back(di[k]);
          sj.push_back(dj[k]);
        } else if (di[k] != dj[k]) {
          same_rest = false;
        }
      }
      if (same_rest) out(i, j) = m(index_of(si, d), index_of(sj, d));
    }
  }
  return out;
}

// trace over `traced`, keeping support \ traced in increasing order
inline Mat partial_trace(const Mat& m, const Sites& support, const Sites& traced, int d) {
  Sites keep;
  for (int s : support)
    if (position(traced, s) < 0) keep.push_back(s);
  const long long kd = power(d, static_cast<int>(keep.size()));
  const long long dim = m.rows();
  Mat out = Mat::Zero(kd, kd);
  for (long long i = 0; i < dim; ++i) {
    const auto di = digits(i, static_cast<int>(support.size()), d);
    for (long long j = 0; j < dim; ++j) {
      const auto dj = digits(j, static_cast<int>(support.size()), d);
      bool diag = true;
      std::vector<int> ki, kj;
      for (size_t k = 0; k < support.size(); ++k) {
        if (position(traced, support[k]) >= 0) {
          if (di[k] != dj[k]) diag = false;
        } else {
          ki.push_back(di[k]);
          kj.push_back(dj[k]);
        }
      }
      if (diag) out(index_of(ki, d), index_of(kj, d)) += m(i, j);
    }
  }
  return out;
}

template <class F>
Mat herm_fn(const Mat& h, F f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd v = es.eigenvalues().unaryExpr([f](double x) { return f(x); });
  return es.eigenvectors() * v.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat sqrtm(const Mat& h) {
  return herm_fn(h, [](double x) { return std::sqrt(x); });
}

inline Mat vec_col(const Mat& m) { return Eigen::Map<const Mat>(m.data(), m.size(), 1); }

// matrix units |i><j| on `region`, embedded on all n sites
inline std::vector<Mat> matrix_units(const Sites& region, int n, int d) {
  Sites all;
  for (int s = 0; s < n; ++s) all.push_back(s);
  const long long rd = power(d, static_cast<int>(region.size()));
  std::vector<Mat> out;
  for (long long i = 0; i < rd; ++i)
    for (long long j = 0; j < rd; ++j) {
      Mat e = Mat::Zero(rd, rd);
      e(i, j) = 1.0;
      out.push_back(embed(e, region, all, d));
    }
  return out;
}

// HS-orthogonal projector onto span{O sigma^{1/2} : O on region}, as a D^2 x D^2 matrix
inline Mat gram_projector(const Mat& sigma, const Sites& region, int n, int d) {
  const Mat s = sqrtm(sigma);
  const auto units = matrix_units(region, n, d);
  const long long dd = sigma.rows() * sigma.rows();
  Mat v(dd, static_cast<long long>(units.size()));
  for (size_t k = 0; k < units.size(); ++k) v.col(k) = vec_col(units[k] * s);
  const Mat g = v.adjoint() * v;
  return v * g.inverse() * v.adjoint();
}

// Delta from its definition: Gram matrices of GNS inner products on matrix-unit bases of AD and CD,
// cross matrix of the Markov defect, largest singular value of G_Q^{-1/2} M G_R^{-1/2}
inline double delta_gram(const Mat& sigma, const Sites& a, const Sites& c, const Sites& dreg, int n, int d) {
  Sites all, acd, ad, cd;
  for (int s = 0; s < n; ++s) all.push_back(s);
  auto merge = [](Sites x, const Sites& y) {
    x.insert(x.end(), y.begin(), y.end());
    std::sort(x.begin(), x.end());
    return x;
  };
  acd = merge(merge(a, c), dreg);
  ad = merge(a, dreg);
  cd = merge(c, dreg);
  auto trace_to = [&](const Sites& keep) {
    Sites traced;
    for (int s : all)
      if (position(keep, s) < 0) traced.push_back(s);
    return partial_trace(sigma, all, traced, d);
  };
  const Mat s_acd = trace_to(acd);
  const Mat s_ad = embed(trace_to(ad), ad, acd, d);
  const Mat s_cd = embed(trace_to(cd), cd, acd, d);
  Mat s_d = Mat::Identity(s_acd.rows(), s_acd.cols());
  if (!dreg.empty()) s_d = embed(trace_to(dreg), dreg, acd, d);
  const Mat x = s_acd - s_ad * s_d.inverse() * s_cd;
  auto units = [&](const Sites& r) {
    const long long rd = power(d, static_cast<int>(r.size()));
    std::vector<Mat> out;
    for (long long i = 0; i < rd; ++i)
      for (long long j = 0; j < rd; ++j) {
        Mat e = Mat::Zero(rd, rd);
        e(i, j) = 1.0;
        out.push_back(embed(e, r, acd, d));
      }
    return out;
  };
  const auto rs = units(ad);
  const auto qs = units(cd);
  auto gram = [&](const std::vector<Mat>& b) {
    Mat g(b.size(), b.size());
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) g(i, j) = (s_acd * b[i].adjoint() * b[j]).trace();
    return g;
  };
  const Mat gr = gram(rs);
  const Mat gq = gram(qs);
  Mat m(qs.size(), rs.size());
  for (size_t i = 0; i < qs.size(); ++i)
    for (size_t j = 0; j < rs.size(); ++j) m(i, j) = (x * qs[i].adjoint() * rs[j]).trace();
  auto inv_sqrt = [](const Mat& g) { return herm_fn(g, [](double v) { return 1.0 / std::sqrt(v); }); };
  const Mat k = inv_sqrt(gq) * m * inv_sqrt(gr);
  Eigen::JacobiSVD<Mat> svd(k);
  return svd.singularValues()(0);
}

// classical Ising ring energy of a spin configuration (bit 1 = spin down)
inline double ising_energy(long long config, int n) {
  double e = 0.0;
  for (int k = 0; k < n; ++k) {
    const int sk = ((config >> (n - 1 - k)) & 1) ? -1 : 1;
    const int k1 = (k + 1) % n;
    const int sk1 = ((config >> (n - 1 - k1)) & 1) ? -1 : 1;
    e -= sk * sk1;
  }
  return e;
}

inline double ising_partition_brute(int n, double beta) {
  double z = 0.0;
  for (long long c = 0; c < (1LL << n); ++c) z += std::exp(-beta * ising_energy(c, n));
  return z;
}

inline Mat ising_gibbs_brute(int n, double beta) {
  const long long dim = 1LL << n;
  Mat rho = Mat::Zero(dim, dim);
  for (long long c = 0; c < dim; ++c) rho(c, c) = std::exp(-beta * ising_energy(c, n));
  return rho / rho.trace();
}

inline double rel_err(const Mat& a, const Mat& b) {
  const double nb = b.norm();
  return (a - b).norm() / (nb > 0 ? nb : 1.0);
}

}  // namespace oracle
