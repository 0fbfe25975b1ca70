#include "pgap/gibbs.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pgap {

Mat gibbs_weight(const Mat& h, double beta) {
  if (!is_hermitian(h, 1e-10)) throw Error(ErrorKind::model, "Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  const RVec& e = es.eigenvalues();
  RVec w = (-beta * e.array()).exp();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix gibbs_state(const Mat& h, int n_sites, int d, double beta) {
  if (!is_hermitian(h, 1e-10)) throw Error(ErrorKind::model, "Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  const RVec& e = es.eigenvalues();
  // shift by the ground energy to avoid overflow
  RVec w = (-beta * (e.array() - e(0))).exp();
  w /= w.sum();
  Mat rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(rho, n_sites, d);
}

DensityMatrix gibbs_state(const Interaction& phi, double beta, long long max_dim) {
  if (beta < 0) throw Error(ErrorKind::parameter, "beta must be nonnegative");
  if (phi.lattice.dim() > max_dim) throw Error(ErrorKind::capacity, "state dimension over dense threshold");
  return gibbs_state(phi.hamiltonian(), phi.lattice.site_count(), phi.lattice.d, beta);
}

double ising_partition_function(int n, double beta) {
  if (n < 2) throw Error(ErrorKind::parameter, "Ising ring needs N >= 2");
  return std::pow(2.0 * std::cosh(beta), n) * (1.0 + std::pow(std::tanh(beta), n));
}

Sites cyclic_interval(int n, int start, int length) {
  Sites s;
  for (int i = 0; i < length; ++i) s.push_back(((start + i) % n + n) % n);
  return normalize_region(s);
}

Operator ising_marginal_closed(int n, double beta, int start, int length) {
  if (n < 2) throw Error(ErrorKind::parameter, "Ising ring needs N >= 2");
  if (length < 1 || length >= n) throw Error(ErrorKind::interval, "interval must be proper and nonempty");
  const Sites sup = cyclic_interval(n, start, length);
  const int first = ((start % n) + n) % n;
  const int last = (first + length - 1) % n;
  const int m = length;
  const long long dim = ipow(2, m);
  Mat h_in = Mat::Zero(dim, dim);
  const Mat zz = -kron(pauli('Z'), pauli('Z'));
  for (int k = 0; k + 1 < m; ++k) {
    const int a = (first + k) % n, b = (first + k + 1) % n;
    h_in += embed(zz, {std::min(a, b), std::max(a, b)}, sup, 2);
  }
  Mat zfl = first == last ? identity(dim) : Mat(embed(kron(pauli('Z'), pauli('Z')), {std::min(first, last), std::max(first, last)}, sup, 2));
  const double t = std::tanh(beta);
  // the outside path carries n - m + 1 bonds; bonds inside I live in e^{-beta H_I}
  const double pref = std::pow(2.0, n - m) * std::pow(std::cosh(beta), n - m + 1);
  Mat out = pref * (identity(dim) + std::pow(t, n - m + 1) * zfl) * gibbs_weight(h_in, beta);
  return {sup, out};
}

// ---------------------------------------------------------------- quantum double

std::vector<int> stars_touching(const Lattice& lat, const Sites& region) {
  std::vector<int> out;
  for (int v = 0; v < lat.vertex_count(); ++v) {
    auto s = lat.star(v);
    for (int e : s)
      if (std::binary_search(region.begin(), region.end(), e)) {
        out.push_back(v);
        break;
      }
  }
  return out;
}

std::vector<int> plaquettes_touching(const Lattice& lat, const Sites& region) {
  std::vector<int> out;
  for (int f = 0; f < lat.face_count(); ++f) {
    auto p = lat.plaquette(f);
    for (int e : p)
      if (std::binary_search(region.begin(), region.end(), e)) {
        out.push_back(f);
        break;
      }
  }
  return out;
}

Sites qd_closure(const Lattice& lat, const Sites& region) {
  Sites out = region;
  for (int v : stars_touching(lat, region)) {
    auto s = lat.star(v);
    out = region_union(out, normalize_region({s.begin(), s.end()}));
  }
  for (int f : plaquettes_touching(lat, region)) {
    auto p = lat.plaquette(f);
    out = region_union(out, normalize_region({p.begin(), p.end()}));
  }
  return out;
}

namespace {

// Every pair of edges of R must be reachable through a chain of touching
// cells whose consecutive overlaps are nonempty and inside R.
bool chain_connected(const Sites& region, const std::vector<Sites>& cells) {
  const int k = static_cast<int>(cells.size());
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      Sites inter = region_intersection(cells[i], cells[j]);
      if (!inter.empty() && is_subset(inter, region)) parent[find(i)] = find(j);
    }
  std::vector<std::vector<int>> comps_of_edge;
  for (int e : region) {
    std::vector<int> c;
    for (int i = 0; i < k; ++i)
      if (std::binary_search(cells[i].begin(), cells[i].end(), e)) c.push_back(find(i));
    comps_of_edge.push_back(c);
  }
  for (size_t a = 0; a < comps_of_edge.size(); ++a)
    for (size_t b = a + 1; b < comps_of_edge.size(); ++b) {
      bool ok = false;
      for (int x : comps_of_edge[a])
        for (int y : comps_of_edge[b]) ok = ok || x == y;
      if (!ok) return false;
    }
  return true;
}

}  // namespace

Connectivity connectivity_check(const Lattice& lat, const Sites& region) {
  if (lat.kind != Lattice::Kind::torus_edges) throw Error(ErrorKind::geometry, "connectivity needs a torus lattice");
  validate_region(region, lat.site_count());
  std::vector<Sites> stars, plaqs;
  for (int v : stars_touching(lat, region)) {
    auto s = lat.star(v);
    stars.push_back(normalize_region({s.begin(), s.end()}));
  }
  for (int f : plaquettes_touching(lat, region)) {
    auto p = lat.plaquette(f);
    plaqs.push_back(normalize_region({p.begin(), p.end()}));
  }
  return {chain_connected(region, stars), chain_connected(region, plaqs)};
}

namespace {

void require_connected(const Lattice& lat, const Sites& region) {
  if (region.empty()) throw Error(ErrorKind::region, "region must be nonempty");
  Connectivity c = connectivity_check(lat, region);
  if (!c.by_stars || !c.by_plaquettes)
    throw Error(ErrorKind::hypothesis, "region is not connected by stars and plaquettes");
}

long long checked_dim(int d, size_t sites, long long max_dim) {
  const double logd = sites * std::log2(static_cast<double>(d));
  if (logd > 40 || ipow(d, static_cast<int>(sites)) > max_dim)
    throw Error(ErrorKind::capacity, "closure dimension over dense threshold");
  return ipow(d, static_cast<int>(sites));
}

}  // namespace

QdMarginalForm qd_marginal_closed(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region) {
  if (!g.abelian || g.characters.empty()) throw Error(ErrorKind::capability, "closed-form marginal needs an abelian group");
  if (lat.d != g.order) throw Error(ErrorKind::dimension, "local dimension must equal the group order");
  validate_region(region, lat.site_count());
  require_connected(lat, region);
  QdMarginalForm f;
  f.region = region;
  f.closure = qd_closure(lat, region);
  f.outer = region_minus(f.closure, region);
  const auto stars = stars_touching(lat, region);
  const auto plaqs = plaquettes_touching(lat, region);
  f.n_stars = static_cast<int>(stars.size());
  f.n_plaquettes = static_cast<int>(plaqs.size());
  const double q = g.order;
  f.gamma = std::expm1(beta) / q;
  const double w = f.gamma / (1.0 + f.gamma);
  f.star_weight = std::pow(w, f.n_stars);
  f.plaquette_weight = std::pow(w, f.n_plaquettes);
  f.kappa = std::pow(q, static_cast<double>(region.size())) * std::pow(1.0 + f.gamma, f.n_stars + f.n_plaquettes);

  const long long dim = checked_dim(g.order, f.closure.size(), 1 << 14);
  Mat a = Mat::Zero(dim, dim);
  for (int h = 0; h < g.order; ++h) {
    Mat prod = identity(dim);
    for (int v : stars) {
      Operator s = star_operator(lat, g, v, h);
      prod = embed(s.m, s.support, f.closure, g.order) * prod;
    }
    a += prod;
  }
  a /= q;
  Mat b = Mat::Zero(dim, dim);
  for (int c = 0; c < static_cast<int>(g.characters.size()); ++c) {
    Mat prod = identity(dim);
    for (int p : plaqs) {
      Operator pl = plaquette_operator(lat, g, p, c);
      prod = embed(pl.m, pl.support, f.closure, g.order) * prod;
    }
    b += prod;
  }
  b /= q;
  // both act trivially on the region itself
  const double norm_r = std::pow(q, static_cast<double>(region.size()));
  f.star_projector = partial_trace(a, f.closure, region, g.order) / norm_r;
  f.plaquette_projector = partial_trace(b, f.closure, region, g.order) / norm_r;
  const long long od = f.star_projector.rows();
  Mat left = (1.0 - f.star_weight) * identity(od) + q * f.star_weight * f.star_projector;
  Mat right = (1.0 - f.plaquette_weight) * identity(od) + q * f.plaquette_weight * f.plaquette_projector;
  f.materialized = f.kappa * left * right;
  return f;
}

Mat qd_boundary_trace(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region) {
  if (lat.d != g.order) throw Error(ErrorKind::dimension, "local dimension must equal the group order");
  validate_region(region, lat.site_count());
  const Sites closure = qd_closure(lat, region);
  const long long dim = checked_dim(g.order, closure.size(), 1 << 14);
  const double c = std::expm1(beta);
  Mat prod = identity(dim);
  for (int v : stars_touching(lat, region)) {
    Operator s = star_operator(lat, g, v, std::nullopt);
    prod = prod + c * embed(s.m, s.support, closure, g.order) * prod;
  }
  for (int p : plaquettes_touching(lat, region)) {
    Operator pl = plaquette_operator(lat, g, p, kDeltaIdentity);
    prod = prod + c * embed(pl.m, pl.support, closure, g.order) * prod;
  }
  return partial_trace(prod, closure, region, g.order);
}

QdSandwich qd_trace_sandwich(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region,
                             bool check_spectrum, long long max_dim) {
  if (lat.kind != Lattice::Kind::torus_edges) throw Error(ErrorKind::geometry, "sandwich needs a torus lattice");
  validate_region(region, lat.site_count());
  require_connected(lat, region);
  QdSandwich s;
  const int ns = static_cast<int>(stars_touching(lat, region).size());
  const int np = static_cast<int>(plaquettes_touching(lat, region).size());
  const double q = g.order;
  const double gamma = std::expm1(beta) / q;
  const double w = gamma / (1.0 + gamma);
  s.kappa = std::pow(q, static_cast<double>(region.size())) * std::pow(1.0 + gamma, ns + np);
  s.m = std::min(ns, np);
  const double ws = std::pow(w, ns), wp = std::pow(w, np);
  s.lower = s.kappa * (1.0 - wp) * (1.0 - ws);
  s.upper = s.kappa * (1.0 + (q - 1.0) * wp) * (1.0 + (q - 1.0) * ws);
  s.defect_bound = (q * q - 1.0) * std::pow(w, s.m);
  if (check_spectrum) {
    const Sites closure = qd_closure(lat, region);
    checked_dim(g.order, closure.size(), max_dim);
    Mat tr = qd_boundary_trace(lat, g, beta, region);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(tr), Eigen::EigenvaluesOnly);
    s.checked = true;
    s.spectrum_min = es.eigenvalues()(0);
    s.spectrum_max = es.eigenvalues()(es.eigenvalues().size() - 1);
    const double tol = 1e-10 * s.kappa;
    s.inside = s.spectrum_min >= s.lower - tol && s.spectrum_max <= s.upper + tol;
  }
  return s;
}

}  // namespace pgap
