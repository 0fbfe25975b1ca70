#include "pgap/models.hpp"

#include "pgap/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pgap {

// ---------------------------------------------------------------- interaction

int Interaction::range() const {
  int r = 0;
  for (const Operator& t : terms) {
    const Sites& s = t.support;
    if (s.empty()) continue;
    if (lattice.kind == Lattice::Kind::torus_edges) {
      r = std::max(r, static_cast<int>(s.size()));
      continue;
    }
    const int n = lattice.n;
    int max_gap = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      const int next = i + 1 < s.size() ? s[i + 1] : s[0] + n;
      max_gap = std::max(max_gap, next - s[i]);
    }
    r = std::max(r, n - max_gap + 1);
  }
  return r;
}

double Interaction::strength() const {
  std::vector<double> acc(lattice.site_count(), 0.0);
  for (const Operator& t : terms) {
    const double nrm = op_norm(t.m);
    for (int x : t.support) acc[x] += nrm;
  }
  return acc.empty() ? 0.0 : *std::max_element(acc.begin(), acc.end());
}

Mat Interaction::hamiltonian_on(const Sites& region) const {
  const long long dim = ipow(lattice.d, static_cast<int>(region.size()));
  if (dim > 1 << 14) throw Error(ErrorKind::capacity, "Hamiltonian dimension over dense threshold");
  Mat h = Mat::Zero(dim, dim);
  for (const Operator& t : terms)
    if (is_subset(t.support, region)) h += embed(t.m, t.support, region, lattice.d);
  return h;
}

Sites Interaction::closure(const Sites& region) const {
  Sites out = region;
  for (const Operator& t : terms)
    if (!region_intersection(t.support, region).empty()) out = region_union(out, t.support);
  return out;
}

Mat Interaction::boundary_hamiltonian(const Sites& region) const {
  const Sites cl = closure(region);
  const long long dim = ipow(lattice.d, static_cast<int>(cl.size()));
  if (dim > 1 << 14) throw Error(ErrorKind::capacity, "boundary Hamiltonian dimension over dense threshold");
  Mat h = Mat::Zero(dim, dim);
  for (const Operator& t : terms)
    if (!region_intersection(t.support, region).empty()) h += embed(t.m, t.support, cl, lattice.d);
  return h;
}

double Interaction::max_commutator() const {
  double worst = 0.0;
  for (size_t i = 0; i < terms.size(); ++i)
    for (size_t j = i + 1; j < terms.size(); ++j) {
      if (region_intersection(terms[i].support, terms[j].support).empty()) continue;
      const Sites u = region_union(terms[i].support, terms[j].support);
      Mat a = embed(terms[i].m, terms[i].support, u, lattice.d);
      Mat b = embed(terms[j].m, terms[j].support, u, lattice.d);
      worst = std::max(worst, op_norm(commutator(a, b)));
    }
  return worst;
}

void Interaction::validate() const {
  for (const Operator& t : terms) {
    validate_region(t.support, lattice.site_count());
    if (t.m.rows() != ipow(lattice.d, static_cast<int>(t.support.size())) || t.m.cols() != t.m.rows())
      throw Error(ErrorKind::model, "term dimension does not match its support");
    if (!is_hermitian(t.m)) throw Error(ErrorKind::model, "interaction term is not Hermitian");
  }
}

Interaction ising_ring(int n) {
  if (n < 2) throw Error(ErrorKind::parameter, "Ising ring needs N >= 2");
  Interaction phi;
  phi.lattice = Lattice::ring(n, 2);
  phi.commuting = true;
  phi.name = "ising";
  const Mat zz = -kron(pauli('Z'), pauli('Z'));
  for (int k = 0; k < n; ++k) {
    const int a = k, b = (k + 1) % n;
    phi.terms.push_back({{std::min(a, b), std::max(a, b)}, zz});
  }
  return phi;
}

Interaction random_ring(int n, int r, double j, std::uint64_t seed, int d) {
  if (r < 1 || r >= n) throw Error(ErrorKind::parameter, "random ring needs 1 <= r < N");
  if (!(j > 0)) throw Error(ErrorKind::parameter, "random ring needs J > 0");
  Interaction phi;
  phi.lattice = Lattice::ring(n, d);
  phi.name = "random";
  CounterRng base(seed);
  for (int k = 0; k < n; ++k) {
    Sites raw;
    for (int i = 0; i < r; ++i) raw.push_back((k + i) % n);
    Sites sup = normalize_region(raw);
    CounterRng rng = base.substream(static_cast<std::uint64_t>(k));
    Mat h = random_hermitian(rng, ipow(d, r));
    // random term is drawn in interval order; permute into lattice order
    Mat m = h;
    if (sup != raw) {
      const long long dim = h.rows();
      std::vector<long long> perm(dim);
      for (long long idx = 0; idx < dim; ++idx) {
        std::vector<int> digits(r);
        long long rem = idx;
        for (int i = r - 1; i >= 0; --i) {
          digits[i] = static_cast<int>(rem % d);
          rem /= d;
        }
        long long target = 0;
        for (int s : sup) {
          const int pos = static_cast<int>(std::find(raw.begin(), raw.end(), s) - raw.begin());
          target = target * d + digits[pos];
        }
        perm[idx] = target;
      }
      for (long long a = 0; a < dim; ++a)
        for (long long b = 0; b < dim; ++b) m(perm[a], perm[b]) = h(a, b);
    }
    phi.terms.push_back({sup, m});
  }
  const double s = phi.strength();
  for (Operator& t : phi.terms) t.m *= j / s;
  return phi;
}

Interaction custom_interaction(const Lattice& lattice, std::vector<Operator> terms, std::string name) {
  Interaction phi;
  phi.lattice = lattice;
  phi.terms = std::move(terms);
  phi.name = std::move(name);
  phi.validate();
  phi.commuting = phi.check_commuting();
  return phi;
}

// ---------------------------------------------------------------- groups

Mat GroupSpec::left_regular(int g) const {
  Mat m = Mat::Zero(order, order);
  for (int h = 0; h < order; ++h) m(op(g, h), h) = 1.0;
  return m;
}

Mat GroupSpec::right_regular(int g) const {
  Mat m = Mat::Zero(order, order);
  for (int h = 0; h < order; ++h) m(op(h, inv[g]), h) = 1.0;
  return m;
}

void GroupSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::model, "group " + what); };
  if (static_cast<int>(mul.size()) != order) fail("table has wrong size");
  for (int a = 0; a < order; ++a) {
    if (op(identity, a) != a || op(a, identity) != a) fail("identity axiom fails");
    if (op(a, inv[a]) != identity || op(inv[a], a) != identity) fail("inverse axiom fails");
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        if (op(op(a, b), c) != op(a, op(b, c))) fail("is not associative");
  }
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) {
      if (max_abs(left_regular(g) * right_regular(h) - right_regular(h) * left_regular(g)) > 0) fail("L and R do not commute");
      if (max_abs(left_regular(g) * left_regular(h) - left_regular(op(g, h))) > 0) fail("L is not a representation");
      if (max_abs(right_regular(g) * right_regular(h) - right_regular(op(g, h))) > 0) fail("R is not a representation");
    }
  if (!characters.empty()) {
    if (!abelian) fail("character table given for nonabelian group");
    for (const auto& chi : characters)
      for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h)
          if (std::abs(chi[op(g, h)] - chi[g] * chi[h]) > 1e-12) fail("character is not multiplicative");
    for (size_t a = 0; a < characters.size(); ++a)
      for (size_t b = 0; b < characters.size(); ++b) {
        cplx s = 0;
        for (int h = 0; h < order; ++h) s += std::conj(characters[a][h]) * characters[b][h];
        if (std::abs(s - (a == b ? static_cast<double>(order) : 0.0)) > 1e-10) fail("characters not orthogonal");
      }
  }
}

GroupSpec group_from_table(std::vector<std::vector<int>> mul, std::string name) {
  GroupSpec g;
  g.order = static_cast<int>(mul.size());
  g.mul = std::move(mul);
  g.name = std::move(name);
  g.identity = -1;
  for (int e = 0; e < g.order && g.identity < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < g.order; ++a) ok = ok && g.mul[e][a] == a && g.mul[a][e] == a;
    if (ok) g.identity = e;
  }
  if (g.identity < 0) throw Error(ErrorKind::model, "group table has no identity");
  g.inv.assign(g.order, -1);
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      if (g.mul[a][b] == g.identity) g.inv[a] = b;
  for (int a = 0; a < g.order; ++a)
    if (g.inv[a] < 0) throw Error(ErrorKind::model, "group table lacks inverses");
  g.abelian = true;
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b) g.abelian = g.abelian && g.mul[a][b] == g.mul[b][a];
  return g;
}

GroupSpec cyclic_group(int n) {
  if (n < 1) throw Error(ErrorKind::parameter, "cyclic group order must be positive");
  std::vector<std::vector<int>> mul(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mul[a][b] = (a + b) % n;
  GroupSpec g = group_from_table(std::move(mul), "Z" + std::to_string(n));
  for (int k = 0; k < n; ++k) {
    std::vector<cplx> row(n);
    for (int h = 0; h < n; ++h) {
      // reduce the phase first so the real roots of unity come out exact
      const int m = (k * h) % n;
      if (m == 0) row[h] = 1.0;
      else if (2 * m == n) row[h] = -1.0;
      else if (4 * m == n) row[h] = cplx(0.0, 1.0);
      else if (4 * m == 3 * n) row[h] = cplx(0.0, -1.0);
      else row[h] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
    }
    g.characters.push_back(row);
  }
  return g;
}

GroupSpec symmetric_group_s3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const int n = static_cast<int>(perms.size());
  std::vector<std::vector<int>> mul(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      mul[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return group_from_table(std::move(mul), "S3");
}

// ---------------------------------------------------------------- quantum double

namespace {

void require_torus(const Lattice& lat, const GroupSpec& g) {
  if (lat.kind != Lattice::Kind::torus_edges) throw Error(ErrorKind::geometry, "quantum double needs a torus lattice");
  if (lat.d != g.order) throw Error(ErrorKind::dimension, "local dimension must equal the group order");
}

// position of each role edge inside the sorted support
std::array<int, 4> role_positions(const std::array<int, 4>& edges, const Sites& sup) {
  std::array<int, 4> pos{};
  for (int r = 0; r < 4; ++r) pos[r] = static_cast<int>(std::lower_bound(sup.begin(), sup.end(), edges[r]) - sup.begin());
  return pos;
}

void decode(long long idx, int base, std::array<int, 4>& digits) {
  for (int i = 3; i >= 0; --i) {
    digits[i] = static_cast<int>(idx % base);
    idx /= base;
  }
}

long long encode(const std::array<int, 4>& digits, int base) {
  long long idx = 0;
  for (int i = 0; i < 4; ++i) idx = idx * base + digits[i];
  return idx;
}

Mat star_element(const GroupSpec& g, const std::array<int, 4>& pos, int element) {
  const int q = g.order;
  const long long dim = ipow(q, 4);
  const auto outgoing = Lattice::star_outgoing();
  Mat m = Mat::Zero(dim, dim);
  std::array<int, 4> digits{}, image{};
  for (long long idx = 0; idx < dim; ++idx) {
    decode(idx, q, digits);
    image = digits;
    for (int r = 0; r < 4; ++r) {
      const int h = digits[pos[r]];
      image[pos[r]] = outgoing[r] ? g.op(element, h) : g.op(h, g.inv[element]);
    }
    m(encode(image, q), idx) = 1.0;
  }
  return m;
}

}  // namespace

Operator star_operator(const Lattice& lat, const GroupSpec& g, int vertex, std::optional<int> element) {
  require_torus(lat, g);
  if (vertex < 0 || vertex >= lat.vertex_count()) throw Error(ErrorKind::geometry, "vertex out of range");
  const auto edges = lat.star(vertex);
  Sites sup = normalize_region({edges.begin(), edges.end()});
  if (sup.size() != 4) throw Error(ErrorKind::geometry, "star edges are not distinct");
  const auto pos = role_positions(edges, sup);
  if (element) {
    if (*element < 0 || *element >= g.order) throw Error(ErrorKind::parameter, "group element out of range");
    return {sup, star_element(g, pos, *element)};
  }
  Mat avg = Mat::Zero(ipow(g.order, 4), ipow(g.order, 4));
  for (int h = 0; h < g.order; ++h) avg += star_element(g, pos, h);
  return {sup, avg / static_cast<double>(g.order)};
}

Operator plaquette_operator(const Lattice& lat, const GroupSpec& g, int face, int label) {
  require_torus(lat, g);
  if (face < 0 || face >= lat.face_count()) throw Error(ErrorKind::geometry, "face out of range");
  if (label != kDeltaIdentity) {
    if (!g.abelian || g.characters.empty())
      throw Error(ErrorKind::capability, "character labels need an abelian group with a character table");
    if (label < 0 || label >= static_cast<int>(g.characters.size()))
      throw Error(ErrorKind::parameter, "character index out of range");
  }
  const auto edges = lat.plaquette(face);
  Sites sup = normalize_region({edges.begin(), edges.end()});
  if (sup.size() != 4) throw Error(ErrorKind::geometry, "plaquette edges are not distinct");
  const auto pos = role_positions(edges, sup);
  const int q = g.order;
  const long long dim = ipow(q, 4);
  Mat m = Mat::Zero(dim, dim);
  std::array<int, 4> digits{};
  for (long long idx = 0; idx < dim; ++idx) {
    decode(idx, q, digits);
    const int g1 = digits[pos[0]], g2 = digits[pos[1]], g3 = digits[pos[2]], g4 = digits[pos[3]];
    if (label == kDeltaIdentity) {
      const int hol = g.op(g.op(g.op(g1, g2), g.inv[g3]), g.inv[g4]);
      m(idx, idx) = hol == g.identity ? 1.0 : 0.0;
    } else {
      const auto& chi = g.characters[label];
      m(idx, idx) = chi[g1] * chi[g2] * std::conj(chi[g3]) * std::conj(chi[g4]);
    }
  }
  return {sup, m};
}

Operator plaquette_from_characters(const Lattice& lat, const GroupSpec& g, int face) {
  if (!g.abelian || g.characters.empty()) throw Error(ErrorKind::capability, "character sum needs an abelian group");
  Operator acc = plaquette_operator(lat, g, face, 0);
  for (int c = 1; c < static_cast<int>(g.characters.size()); ++c) acc.m += plaquette_operator(lat, g, face, c).m;
  acc.m /= static_cast<double>(g.order);
  return acc;
}

Interaction quantum_double(int n, const GroupSpec& g) {
  if (n < 2) throw Error(ErrorKind::parameter, "quantum double needs N >= 2");
  Interaction phi;
  phi.lattice = Lattice::torus(n, g.order);
  phi.commuting = true;
  phi.name = "qd_" + g.name;
  for (int v = 0; v < phi.lattice.vertex_count(); ++v) {
    Operator a = star_operator(phi.lattice, g, v, std::nullopt);
    phi.terms.push_back({a.support, -a.m});
  }
  for (int f = 0; f < phi.lattice.face_count(); ++f) {
    Operator b = plaquette_operator(phi.lattice, g, f, kDeltaIdentity);
    phi.terms.push_back({b.support, -b.m});
  }
  return phi;
}

}  // namespace pgap
