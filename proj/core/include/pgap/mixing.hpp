#pragma once

#include "pgap/algebra.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pgap {

struct Partition {
  Sites a, b, c, d;
  // disjoint, covering, A and C nonempty; throws partition errors naming the offending sites
  void validate(int site_count) const;
  std::string format() const;
};

struct DeltaBounds {
  double half_sum_upper = 0.0;
  std::optional<double> d_empty_upper;
  std::optional<double> commuting_upper;
  double marginal_commutator = 0.0;  // largest of the three marginal commutators
  double corr_lower = 0.0;
};

struct MixingReport {
  double delta = 0.0;
  std::string method;
  Mat q_cd;  // GNS-normalized witnesses on CD and AD (sites in lattice order)
  Mat r_ad;
  double residual = 0.0;
  std::optional<DeltaBounds> bounds;
};

struct DeltaOptions {
  long long basis_cap = 4096;  // largest operator-space dimension on AD or CD
  long long dense_cap = 256;   // dense SVD when both operator spaces are at most this
  std::uint64_t seed = 0x5eedULL;
};

// sup |Tr[(sigma_ACD - sigma_AD sigma_D^{-1} sigma_DC) Q^dag R]| over GNS unit R on AD, Q on CD
MixingReport delta_direct(const DensityMatrix& sigma, const Partition& p, const DeltaOptions& opts = {});
// sup |<Q, R>_sigma| over GNS unit Q, R with Tr_C(Q sigma_CD) = Tr_A(R sigma_AD) = 0
double delta_constrained(const DensityMatrix& sigma, const Partition& p, const DeltaOptions& opts = {});
DeltaBounds delta_upper_bounds(const DensityMatrix& sigma, const Partition& p);

// certified lower bound on the operator-norm-ball covariance sup
double corr_lower(const DensityMatrix& sigma, const Sites& a, const Sites& c, int ascent_rounds = 30);

// Ring geometry with A, I1, C, I2 consecutive arcs; D is empty, I1 or I2 and B the rest.
enum class ShieldD { empty, i1, i2 };
Partition ring_shield_partition(int n, int a_start, int a_len, int i1_len, int c_len, ShieldD which);
// min(|I1|, |I2|) of a partition realizing the shielded ring geometry; throws otherwise
int shielding_length(int n, const Partition& p);

struct ScanRow {
  int ell = 0;
  std::string partition;
  double delta = 0.0;
  std::optional<double> envelope;
};

std::vector<ScanRow> delta_decay_scan(const DensityMatrix& sigma, const std::vector<Partition>& partitions,
                                      const std::function<double(int)>& envelope = {});

}  // namespace pgap
