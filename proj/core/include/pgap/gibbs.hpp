#pragma once

#include "pgap/algebra.hpp"
#include "pgap/models.hpp"

namespace pgap {

constexpr long long kDenseStateDim = 4096;

// e^{-beta h} through the spectrum of the re-symmetrized h
Mat gibbs_weight(const Mat& h, double beta);
DensityMatrix gibbs_state(const Mat& h, int n_sites, int d, double beta);
DensityMatrix gibbs_state(const Interaction& phi, double beta, long long max_dim = kDenseStateDim);

double ising_partition_function(int n, double beta);
// Tr_{I^c} e^{-beta H} for the cyclic interval I = {start, ..., start+length-1}, on sorted sites
Operator ising_marginal_closed(int n, double beta, int start, int length);
Sites cyclic_interval(int n, int start, int length);

struct Connectivity {
  bool by_stars = false;
  bool by_plaquettes = false;
};
// chain connectivity of a set of torus edges through its incident stars (plaquettes)
Connectivity connectivity_check(const Lattice& lat, const Sites& region);
std::vector<int> stars_touching(const Lattice& lat, const Sites& region);
std::vector<int> plaquettes_touching(const Lattice& lat, const Sites& region);
// union of all edges of the touching stars and plaquettes (contains region)
Sites qd_closure(const Lattice& lat, const Sites& region);

struct QdMarginalForm {
  Sites region;
  Sites closure;
  Sites outer;  // closure minus region: where the marginal acts
  int n_stars = 0;
  int n_plaquettes = 0;
  double gamma = 0.0;
  double kappa = 0.0;
  double star_weight = 0.0;
  double plaquette_weight = 0.0;
  Mat star_projector;       // A_{S_R} restricted to outer
  Mat plaquette_projector;  // B_{P_R} restricted to outer
  Mat materialized;         // kappa ((1-a) + |G| a A)((1-b) + |G| b B)
};

// closed form of Tr_R prod e^{beta A_s} prod e^{beta B_p} over touching stars and plaquettes
QdMarginalForm qd_marginal_closed(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region);

// brute-force Tr_R of the same product using the delta plaquettes (any group), on closure minus region
Mat qd_boundary_trace(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region);

struct QdSandwich {
  double lower = 0.0;
  double upper = 0.0;
  double defect_bound = 0.0;
  double kappa = 0.0;
  int m = 0;
  bool checked = false;  // spectrum of the brute-force trace was compared
  double spectrum_min = 0.0;
  double spectrum_max = 0.0;
  bool inside = true;
};

QdSandwich qd_trace_sandwich(const Lattice& lat, const GroupSpec& g, double beta, const Sites& region,
                             bool check_spectrum, long long max_dim = 1 << 12);

}  // namespace pgap
