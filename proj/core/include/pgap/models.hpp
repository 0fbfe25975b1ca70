#pragma once

#include "pgap/algebra.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pgap {

struct Interaction {
  Lattice lattice;
  std::vector<Operator> terms;
  bool commuting = false;  // claimed by the builder, see check_commuting
  std::string name;

  // largest support diameter: covering cyclic interval length on rings, support size on tori
  int range() const;
  // sup over sites of the summed operator norms of terms touching the site
  double strength() const;
  // terms supported inside `region`, embedded on `region`
  Mat hamiltonian_on(const Sites& region) const;
  Mat hamiltonian() const { return hamiltonian_on(all_sites(lattice.site_count())); }
  // union of supports of the terms touching `region`, together with `region`
  Sites closure(const Sites& region) const;
  // terms touching `region`, embedded on closure(region)
  Mat boundary_hamiltonian(const Sites& region) const;
  // largest pairwise commutator norm between terms
  double max_commutator() const;
  bool check_commuting(double tol = 1e-10) const { return max_commutator() <= tol; }
  void validate() const;
};

Interaction ising_ring(int n);
// one Gaussian Hermitian term per cyclic interval of length r, rescaled to strength J
Interaction random_ring(int n, int r, double j, std::uint64_t seed, int d = 2);
// wrap user supplied terms
Interaction custom_interaction(const Lattice& lattice, std::vector<Operator> terms, std::string name = "custom");

struct GroupSpec {
  int order = 1;
  std::vector<std::vector<int>> mul;
  std::vector<int> inv;
  int identity = 0;
  bool abelian = true;
  // rows are the homomorphisms G -> U(1); empty for nonabelian groups
  std::vector<std::vector<cplx>> characters;
  std::string name;

  int op(int g, int h) const { return mul[g][h]; }
  // L^g |h> = |gh>
  Mat left_regular(int g) const;
  // R^g |h> = |h g^{-1}>
  Mat right_regular(int g) const;
  // exhaustive axiom, representation and character checks; throws on failure
  void validate() const;
};

GroupSpec group_from_table(std::vector<std::vector<int>> mul, std::string name);
GroupSpec cyclic_group(int n);
GroupSpec symmetric_group_s3();

// A_s(g) for a group element, or the Haar average A_s when `element` is empty.
// Outgoing star edges carry L^g, incoming edges R^g.
Operator star_operator(const Lattice& lat, const GroupSpec& g, int vertex, std::optional<int> element);

// plaquette label: character index, or -1 for the delta at the identity
constexpr int kDeltaIdentity = -1;
// diagonal holonomy operator of g_top g_left g_bottom^{-1} g_right^{-1}
Operator plaquette_operator(const Lattice& lat, const GroupSpec& g, int face, int label);
// B_p assembled as (1/|G|) sum over characters; abelian groups only
Operator plaquette_from_characters(const Lattice& lat, const GroupSpec& g, int face);

// -sum_s A_s - sum_p B_p, stars first then plaquettes
Interaction quantum_double(int n, const GroupSpec& g);

}  // namespace pgap
