#pragma once

#include "pgap/algebra.hpp"
#include "pgap/mixing.hpp"
#include "pgap/models.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace pgap {

// (1 - delta)/(1 + 1/s) * gap_min
double dq_step(double gap_min, double delta, long long s);

struct ProductResult {
  double value = 1.0;
  double log_value = 0.0;
  double truncation_error = 0.0;  // bound on the relative error of the truncation
  long long terms = 0;
  bool log_space = false;
  std::vector<double> factors;  // 1 - x_k for every evaluated k
};

// prod_{k >= k_start} (1 - x_k). Terms are taken until the tail sum estimated from the
// observed decay rate certifies 2 sum_{k>K} x_k <= tol; `forced_terms` fixes the count.
ProductResult tail_product(const std::function<double(long long)>& x, double tol = 1e-15, long long k_start = 0,
                           long long forced_terms = -1);
// same computation accumulated in long double
long double tail_product_extended(const std::function<long double(long long)>& x, long double tol = 1e-18L,
                                  long long k_start = 0);

struct RecursionRow {
  long long k = 0;
  long long ell = 0;
  double delta = 0.0;
  long long s = 0;
  double factor = 1.0;
};

struct Certificate {
  std::string family;
  std::map<std::string, double> parameters;
  std::vector<RecursionRow> trace;
  double prefactor = 1.0;
  double log_prefactor = 0.0;
  int product_power = 1;
  double eta_term = 1.0;
  double product_truncation_error = 0.0;
  bool log_space = false;
  double lower_bound = 0.0;
  double log_value = 0.0;
  std::string branch;
  std::string printed_form;
  std::map<std::string, double> readings;  // alternative readings of printed constants (log values)
  // recompute lower_bound from the trace
  double recompute() const;
  double recompute_log() const;
};

struct DeltaEnvelope {
  std::string family;
  std::function<double(long long)> delta;
  long long floor = 1;
};

double ising_delta(long long ell, double beta);
long double ising_delta_extended(long long ell, long double beta);
DeltaEnvelope ising_envelope(double beta);

struct QdDelta {
  double exact = 0.0;
  double envelope = 0.0;  // 6 |G| q
  bool below_floor = false;
};
// exact 1 - ((1-q)/(1-q+|G|q))^6 with q = (gamma/(1+gamma))^{ell^2}; ell < 2 only with allow_below_floor
QdDelta qd_abelian_delta(long long ell, double beta, int group_order, bool allow_below_floor = false);
DeltaEnvelope qd_abelian_envelope(double beta, int group_order);
long long qd_mu_beta(double beta, int group_order);
double qd_general_delta(long long ell, double beta, int group_order);
DeltaEnvelope qd_general_envelope(double beta, int group_order);

Certificate certificate_1d(const DeltaEnvelope& env, double eta_small, long long n, long long mu);
Certificate certificate_2d(const DeltaEnvelope& env, double eta_small, long long n, long long mu);
Certificate certificate_nd(const std::vector<double>& delta_wrap, const std::function<double(long long)>& delta_seq,
                           double gap_f, int dim);

Certificate ising_gap_corollary(double beta);
Certificate qd_abelian_gap_corollary(double beta, int group_order);
Certificate qd_general_gap_corollary(double beta, int group_order);
// log of the corollary values in long double, for cross-checks
long double ising_gap_corollary_log_extended(long double beta);

double sufficient_condition_delta(double epsilon);

struct BoundaryCheck {
  double epsilon = 0.0;
  double kappa_residual = 0.0;
  std::map<std::string, double> q_norms;
  std::map<std::string, double> kappas;
  bool applicable = false;  // epsilon < 1
  std::optional<double> delta_bound;
};
// Q_dR = Tr_R(e^{-beta H_R^d}) / kappa_R - 1 for R in {AB, B, BC, ABC} on a commuting model.
// kappa_R uses the quantum double closed form when `group` is given and the normalized trace otherwise.
BoundaryCheck boundary_hypothesis_check(const Interaction& phi, double beta, const Partition& p,
                                        const GroupSpec* group = nullptr);

}  // namespace pgap
