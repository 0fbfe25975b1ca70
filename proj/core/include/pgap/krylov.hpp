#pragma once

#include "pgap/algebra.hpp"

#include <cstdint>
#include <functional>

namespace pgap {

using LinearMap = std::function<Vec(const Vec&)>;
// in-place projection applied to every basis vector (e.g. onto the complement of a kernel)
using Projector = std::function<void(Vec&)>;

struct KrylovOptions {
  int nev = 1;
  int max_basis = 48;
  int keep = 16;
  long long max_matvecs = 20000;
  double tol = 1e-8;
  std::uint64_t seed = 0x5eedULL;
  Projector project;
  std::vector<Vec> deflate;  // orthonormalized internally
};

struct KrylovResult {
  RVec values;
  Mat vectors;
  RVec residuals;
  long long matvecs = 0;
  bool converged = false;
};

// Thick-restart Krylov iteration for extreme eigenpairs of a Hermitian map.
// The basis is expanded with the residual of the leading unconverged Ritz pair,
// which keeps it a Krylov space; full reorthogonalization throughout.
KrylovResult lowest_eigenpairs(const LinearMap& a, long long n, const KrylovOptions& opts);
KrylovResult highest_eigenpairs(const LinearMap& a, long long n, const KrylovOptions& opts);

struct NormResult {
  double value = 0.0;
  double residual = 0.0;
  Vec right;  // unit input vector attaining the norm
  Vec left;   // unit output direction
  long long matvecs = 0;
  bool converged = false;
};

// Operator norm of t : C^n_in -> C^n_out from the largest eigenvalue of the
// Hermitian dilation [[0, t], [t^dag, 0]]; best of `restarts` random starts.
NormResult map_norm(const LinearMap& t, const LinearMap& t_adj, long long n_in, long long n_out, double tol = 1e-10,
                    int restarts = 3, std::uint64_t seed = 0x5eedULL);

// Dense matrix of a linear map, column by column.
Mat materialize(const LinearMap& a, long long n_in, long long n_out);

}  // namespace pgap
