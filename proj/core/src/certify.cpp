#include "pgap/certify.hpp"

#include "pgap/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pgap {

namespace {

constexpr long long kMaxTerms = 1000000;
constexpr long long kSummabilityWindow = 10000;
constexpr int kRateWindow = 16;
constexpr int kMinTerms = 16;
constexpr double kLogSpaceFactor = 1e-8;

template <class T>
struct ProductAcc {
  T product = 1;
  T log_sum = 0;
  T error = 0;
  long long terms = 0;
  bool log_space = false;
  std::vector<T> factors;
};

template <class T>
T tail_estimate(const std::vector<T>& x) {
  // geometric decay rate fitted against the previous window; plateaus of floor sequences are averaged out
  const size_t last = x.size() - 1;
  const T xk = x[last];
  bool all_zero = xk == T(0);
  T rate = 0;
  for (size_t j = last >= kRateWindow ? last - kRateWindow : 0; j < last; ++j) {
    if (x[j] != T(0)) all_zero = false;
    if (x[j] <= T(0)) continue;
    if (x[j] >= T(0.5)) return T(-1);
    const T r = std::pow(xk / x[j], T(1) / T(last - j));
    rate = std::max(rate, r);
  }
  if (all_zero) return T(0);
  if (xk >= T(0.5) || rate >= T(1)) return T(-1);
  return xk * rate / (T(1) - rate);
}

template <class T>
ProductAcc<T> run_product(const std::function<T(long long)>& x, T tol, long long k_start, long long forced) {
  ProductAcc<T> acc;
  std::vector<T> xs;
  bool summable_seen = false;
  for (long long k = k_start;; ++k) {
    const long long count = k - k_start;
    if (forced >= 0 && count >= forced) {
      const T tail = xs.empty() ? T(0) : tail_estimate(xs);
      acc.error = tail < T(0) ? T(INFINITY) : T(2) * tail;
      break;
    }
    if (count >= kMaxTerms) throw Error(ErrorKind::divergence, "tail product did not converge within the term cap");
    const T xk = x(k);
    if (!(xk >= T(0)) || !(xk < T(1))) {
      std::ostringstream os;
      os << "product term " << k << " has x_k = " << static_cast<double>(xk) << " outside [0, 1)";
      throw Error(ErrorKind::domain, os.str());
    }
    if (xk < T(0.5)) summable_seen = true;
    if (!summable_seen && count >= kSummabilityWindow)
      throw Error(ErrorKind::divergence, "no summability: delta_k stayed above 1/2 for the first 10^4 terms");
    const T f = T(1) - xk;
    if (f < T(kLogSpaceFactor)) acc.log_space = true;
    acc.product *= f;
    acc.log_sum += std::log1p(-xk);
    acc.factors.push_back(f);
    xs.push_back(xk);
    ++acc.terms;
    if (forced < 0 && acc.terms >= kMinTerms) {
      const T tail = tail_estimate(xs);
      if (tail >= T(0) && T(2) * tail <= tol) {
        acc.error = T(2) * tail;
        break;
      }
    }
  }
  if (acc.log_sum < T(-700)) acc.log_space = true;
  return acc;
}

double combine(double log_prefactor, double prefactor, const std::vector<RecursionRow>& rows, int power,
               double eta_term, bool log_space, double* log_out) {
  double log_v = log_prefactor + std::log(eta_term);
  double v = prefactor * eta_term;
  double prod = 1.0;
  for (const auto& r : rows) {
    log_v += power * std::log(r.factor);
    prod *= r.factor;
  }
  if (log_out) *log_out = log_v;
  if (log_space) return std::exp(log_v);
  return v * std::pow(prod, power);
}

void finish(Certificate& c) {
  c.lower_bound = combine(c.log_prefactor, c.prefactor, c.trace, c.product_power, c.eta_term, c.log_space,
                          &c.log_value);
}

double ising_t(double beta) { return std::tanh(beta); }

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::parameter, "beta must be finite and >= 0");
}

void check_eta(double eta) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw Error(ErrorKind::parameter, "eta must be finite and >= 1");
}

double qd_w(double beta, int order) {
  const double gamma = std::expm1(beta) / order;
  return gamma / (1.0 + gamma);
}

std::vector<RecursionRow> rows_from(const ProductResult& pr, const std::function<long long(long long)>& ell,
                                    const std::function<long long(long long)>& s, long long k_start) {
  std::vector<RecursionRow> rows;
  rows.reserve(pr.factors.size());
  for (size_t i = 0; i < pr.factors.size(); ++i) {
    RecursionRow r;
    r.k = k_start + static_cast<long long>(i);
    r.ell = ell ? ell(r.k) : 0;
    r.s = s ? s(r.k) : 0;
    r.factor = pr.factors[i];
    r.delta = 1.0 - r.factor;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

double dq_step(double gap_min, double delta, long long s) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorKind::domain, "delta must lie in [0, 1)");
  if (s < 1) throw Error(ErrorKind::parameter, "s must be >= 1");
  if (!(gap_min >= 0.0)) throw Error(ErrorKind::parameter, "gap must be >= 0");
  return (1.0 - delta) / (1.0 + 1.0 / static_cast<double>(s)) * gap_min;
}

ProductResult tail_product(const std::function<double(long long)>& x, double tol, long long k_start,
                           long long forced_terms) {
  auto acc = run_product<double>(x, tol, k_start, forced_terms);
  ProductResult r;
  r.log_value = acc.log_sum;
  r.log_space = acc.log_space;
  r.value = acc.log_space ? std::exp(acc.log_sum) : acc.product;
  r.truncation_error = acc.error;
  r.terms = acc.terms;
  r.factors = std::move(acc.factors);
  return r;
}

long double tail_product_extended(const std::function<long double(long long)>& x, long double tol,
                                  long long k_start) {
  auto acc = run_product<long double>(x, tol, k_start, -1);
  return acc.log_space ? std::exp(acc.log_sum) : acc.product;
}

double Certificate::recompute() const {
  return combine(log_prefactor, prefactor, trace, product_power, eta_term, log_space, nullptr);
}

double Certificate::recompute_log() const {
  double lv = 0.0;
  combine(log_prefactor, prefactor, trace, product_power, eta_term, log_space, &lv);
  return lv;
}

double ising_delta(long long ell, double beta) {
  check_beta(beta);
  if (ell < 1) throw Error(ErrorKind::parameter, "ell must be >= 1");
  const double tl = std::pow(ising_t(beta), static_cast<double>(ell));
  return 4.0 * tl / ((1.0 + tl) * (1.0 + tl));
}

long double ising_delta_extended(long long ell, long double beta) {
  if (ell < 1) throw Error(ErrorKind::parameter, "ell must be >= 1");
  const long double tl = std::pow(std::tanh(beta), static_cast<long double>(ell));
  return 4.0L * tl / ((1.0L + tl) * (1.0L + tl));
}

DeltaEnvelope ising_envelope(double beta) {
  check_beta(beta);
  return {"ising", [beta](long long ell) { return ising_delta(ell, beta); }, 1};
}

QdDelta qd_abelian_delta(long long ell, double beta, int group_order, bool allow_below_floor) {
  check_beta(beta);
  if (group_order < 1) throw Error(ErrorKind::parameter, "group order must be >= 1");
  QdDelta r;
  r.below_floor = ell < 2;
  if (r.below_floor && !allow_below_floor)
    throw Error(ErrorKind::hypothesis, "abelian quantum double decay needs ell >= 2");
  if (ell < 1) throw Error(ErrorKind::parameter, "ell must be >= 1");
  const double q = std::pow(qd_w(beta, group_order), static_cast<double>(ell) * static_cast<double>(ell));
  // 1 - (1 - u)^6 with u = |G| q / (1 - q + |G| q), without cancellation for small q
  const double u = group_order * q / (1.0 - q + group_order * q);
  r.exact = -std::expm1(6.0 * std::log1p(-u));
  r.envelope = 6.0 * group_order * q;
  return r;
}

DeltaEnvelope qd_abelian_envelope(double beta, int group_order) {
  check_beta(beta);
  return {"qd-abelian",
          [beta, group_order](long long ell) { return qd_abelian_delta(ell, beta, group_order).exact; }, 2};
}

long long qd_mu_beta(double beta, int group_order) {
  check_beta(beta);
  if (group_order < 1) throw Error(ErrorKind::parameter, "group order must be >= 1");
  return static_cast<long long>(std::ceil(512.0 * std::exp(beta) * (1.0 + std::log(group_order))));
}

double qd_general_delta(long long ell, double beta, int group_order) {
  const long long mu = qd_mu_beta(beta, group_order);
  if (ell < mu) {
    std::ostringstream os;
    os << "general quantum double decay needs ell >= mu_beta = " << mu << ", got " << ell;
    throw Error(ErrorKind::hypothesis, os.str());
  }
  const double e = static_cast<double>(ell);
  return std::pow(qd_w(beta, group_order), e * e / 2.0);
}

DeltaEnvelope qd_general_envelope(double beta, int group_order) {
  const long long mu = qd_mu_beta(beta, group_order);
  return {"qd-general", [beta, group_order](long long ell) { return qd_general_delta(ell, beta, group_order); },
          mu};
}

Certificate certificate_1d(const DeltaEnvelope& env, double eta_small, long long n, long long mu) {
  check_eta(eta_small);
  if (mu < 9) throw Error(ErrorKind::parameter, "mu must be >= 9");
  if (n < 1) throw Error(ErrorKind::parameter, "N must be >= 1");
  auto ell = [mu](long long k) {
    return static_cast<long long>(std::floor(static_cast<double>(mu) / 9.0 * std::pow(9.0 / 8.0, k)));
  };
  if (ell(0) < env.floor) {
    std::ostringstream os;
    os << "ell_0 = " << ell(0) << " is below the validity floor " << env.floor << " of the " << env.family
       << " envelope";
    throw Error(ErrorKind::hypothesis, os.str());
  }
  Certificate c;
  c.family = env.family == "ising" ? "ising-1d" : "generic-1d";
  c.parameters = {{"eta", eta_small}, {"N", static_cast<double>(n)}, {"mu", static_cast<double>(mu)}};
  c.branch = n >= mu ? "recursion" : "rough";
  auto pr = tail_product([&](long long k) { return env.delta(ell(k)); });
  c.trace = rows_from(pr, ell, nullptr, 0);
  c.log_prefactor = -5.0;
  c.prefactor = std::exp(-5.0);
  c.eta_term = std::pow(eta_small, -4.0);
  c.product_truncation_error = pr.truncation_error;
  c.log_space = pr.log_space;
  c.printed_form = "e^-5 * prod_k (1 - delta(floor(mu/9 (9/8)^k))) * eta^-4";
  finish(c);
  return c;
}

Certificate certificate_2d(const DeltaEnvelope& env, double eta_small, long long n, long long mu) {
  check_eta(eta_small);
  if (mu < 256) throw Error(ErrorKind::parameter, "mu must be >= 2^8");
  if (n < mu) throw Error(ErrorKind::parameter, "N must be >= mu");
  auto ell = [mu](long long k) {
    return static_cast<long long>(
        std::floor(std::sqrt(static_cast<double>(mu)) / 8.0 * std::pow(9.0 / 8.0, static_cast<double>(k) / 2.0)));
  };
  if (ell(0) < env.floor) {
    std::ostringstream os;
    os << "ell_0 = " << ell(0) << " is below the validity floor " << env.floor << " of the " << env.family
       << " envelope";
    throw Error(ErrorKind::hypothesis, os.str());
  }
  Certificate c;
  c.family = env.family == "qd-abelian" ? "qd-abelian-2d" : env.family == "qd-general" ? "qd-general-2d" : "generic-2d";
  c.parameters = {{"eta", eta_small}, {"N", static_cast<double>(n)}, {"mu", static_cast<double>(mu)}};
  c.branch = "recursion";
  auto pr = tail_product([&](long long k) { return env.delta(ell(k)); });
  c.trace = rows_from(pr, ell, nullptr, 0);
  // the k = 0 factor enters squared: one extra copy in the trace
  RecursionRow extra = c.trace.front();
  extra.k = -1;
  c.trace.insert(c.trace.begin(), extra);
  c.log_prefactor = -11.0;
  c.prefactor = std::exp(-11.0);
  c.eta_term = std::pow(eta_small, -4.0);
  c.product_truncation_error = pr.truncation_error;
  c.log_space = pr.log_space || extra.factor < kLogSpaceFactor;
  c.printed_form = "e^-11 * (1 - delta_0)^2 * prod_{k>=1} (1 - delta_k) * eta^-4";
  finish(c);
  return c;
}

Certificate certificate_nd(const std::vector<double>& delta_wrap, const std::function<double(long long)>& delta_seq,
                           double gap_f, int dim) {
  if (dim < 1) throw Error(ErrorKind::parameter, "dimension must be >= 1");
  if (!(gap_f > 0.0) || !std::isfinite(gap_f)) throw Error(ErrorKind::parameter, "gap_F must be finite and > 0");
  const long long k_min = static_cast<long long>(std::ceil(dim * std::log(64.0) / std::log(1.5)));
  auto ell_real = [dim](long long k) { return std::pow(1.5, static_cast<double>(k) / dim); };
  auto s_of = [&](long long k) { return static_cast<long long>(std::floor(std::sqrt(ell_real(k)))); };
  Certificate c;
  c.family = "generic-nd";
  c.parameters = {{"D", static_cast<double>(dim)}, {"gap_F", gap_f}, {"k_min", static_cast<double>(k_min)}};
  c.branch = "recursion";
  for (size_t r = 0; r < delta_wrap.size(); ++r) {
    const double dr = delta_wrap[r];
    if (!(dr >= 0.0 && dr < 1.0)) throw Error(ErrorKind::domain, "wrap-around delta must lie in [0, 1)");
    RecursionRow row;
    row.k = -1 - static_cast<long long>(r);
    row.delta = dr;
    row.factor = 1.0 - dr;
    c.trace.push_back(row);
  }
  auto pr = tail_product(
      [&](long long k) {
        const double d = delta_seq(k);
        if (!(d >= 0.0 && d < 1.0)) throw Error(ErrorKind::domain, "delta_k must lie in [0, 1)");
        return 1.0 - (1.0 - d) / (1.0 + 1.0 / static_cast<double>(s_of(k)));
      },
      1e-15, k_min);
  auto rows = rows_from(pr, [&](long long k) { return static_cast<long long>(std::floor(ell_real(k))); }, s_of,
                        k_min);
  for (auto& r : rows) r.delta = delta_seq(r.k);
  c.trace.insert(c.trace.end(), rows.begin(), rows.end());
  c.log_prefactor = -dim * std::log(2.0);
  c.prefactor = std::exp(c.log_prefactor);
  c.eta_term = gap_f;
  c.product_truncation_error = pr.truncation_error;
  c.log_space = pr.log_space;
  for (const auto& r : c.trace) c.log_space = c.log_space || r.factor < kLogSpaceFactor;
  c.printed_form = "2^-D * prod_r (1 - delta^(r)) * prod_{k>=k_min} (1 - delta_k)/(1 + 1/s_k) * gap_F";
  finish(c);
  return c;
}

Certificate ising_gap_corollary(double beta) {
  check_beta(beta);
  Certificate c;
  c.family = "ising-1d";
  c.parameters = {{"beta", beta}};
  c.branch = "closed-form";
  auto y = [](long long k) { return std::exp(-0.5 * std::pow(9.0 / 8.0, static_cast<double>(k))); };
  auto pr = tail_product([&](long long k) { return 2.0 * y(k) / (1.0 + y(k)); }, 1e-16, 1);
  c.trace = rows_from(pr, nullptr, nullptr, 1);
  c.product_power = 2;
  c.log_prefactor = -5.0 - 76.0 * beta - 34.0 * beta * beta;
  c.prefactor = std::exp(c.log_prefactor);
  c.product_truncation_error = 2.0 * pr.truncation_error;
  c.log_space = c.log_prefactor < -700.0;
  c.printed_form = "e^{-5-76 beta} e^{-34 beta^2} (prod_{k>=1} (1 - e^{-(9/8)^k/2})/(1 + e^{-(9/8)^k/2}))^2";
  finish(c);
  return c;
}

long double ising_gap_corollary_log_extended(long double beta) {
  auto y = [](long long k) { return std::exp(-0.5L * std::pow(9.0L / 8.0L, static_cast<long double>(k))); };
  const long double prod = tail_product_extended([&](long long k) { return 2.0L * y(k) / (1.0L + y(k)); }, 1e-19L, 1);
  return -5.0L - 76.0L * beta - 34.0L * beta * beta + 2.0L * std::log(prod);
}

Certificate qd_abelian_gap_corollary(double beta, int group_order) {
  check_beta(beta);
  if (group_order < 2) throw Error(ErrorKind::parameter, "group order must be >= 2");
  Certificate c;
  c.family = "qd-abelian-2d";
  c.parameters = {{"beta", beta}, {"G", static_cast<double>(group_order)}};
  c.branch = "closed-form";
  auto pr = tail_product([](long long k) { return std::exp(-std::pow(9.0 / 8.0, static_cast<double>(k))); }, 1e-16,
                         1);
  c.trace = rows_from(pr, nullptr, nullptr, 1);
  const double printed = -(54.0 * beta * beta - 72.0 * beta);
  const double derived = -54.0 * beta * beta - 72.0 * beta;
  c.readings = {{"printed", printed}, {"derived", derived}};
  const double used = std::min(printed, derived);
  c.log_prefactor = -11.0 + used - 54.0 * beta * std::log(3.0 + std::log(group_order)) - std::ldexp(beta, 22);
  c.prefactor = std::exp(c.log_prefactor);
  c.product_truncation_error = pr.truncation_error;
  c.log_space = true;
  c.printed_form =
      "e^-11 e^{-(54 beta^2 - 72 beta)} (3 + ln|G|)^{-54 beta} e^{-2^22 beta} prod_{k>=1} (1 - e^{-(9/8)^k})";
  finish(c);
  return c;
}

Certificate qd_general_gap_corollary(double beta, int group_order) {
  const long long mu = qd_mu_beta(beta, group_order);
  Certificate c;
  c.family = "qd-general-2d";
  c.parameters = {{"beta", beta}, {"G", static_cast<double>(group_order)}, {"mu_beta", static_cast<double>(mu)}};
  c.branch = "closed-form";
  auto pr = tail_product([](long long k) { return std::exp(-std::pow(9.0 / 8.0, static_cast<double>(k))); }, 1e-16,
                         0);
  c.trace = rows_from(pr, nullptr, nullptr, 0);
  const double m = static_cast<double>(mu);
  c.log_prefactor = -11.0 + 2.0 * std::log1p(-std::exp(-1.0)) - beta * std::ldexp(1.0, 18) * m * m;
  c.prefactor = std::exp(c.log_prefactor);
  c.product_truncation_error = pr.truncation_error;
  c.log_space = true;
  c.printed_form = "e^-11 (1 - e^-1)^2 e^{-beta 2^18 mu_beta^2} prod_{k>=0} (1 - e^{-(9/8)^k})";
  finish(c);
  return c;
}

double sufficient_condition_delta(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::domain, "epsilon must lie in (0, 1)");
  return 4.0 * epsilon / ((1.0 - epsilon) * (1.0 - epsilon));
}

BoundaryCheck boundary_hypothesis_check(const Interaction& phi, double beta, const Partition& p,
                                        const GroupSpec* group) {
  check_beta(beta);
  const int n = phi.lattice.site_count();
  p.validate(n);
  if (!phi.check_commuting()) throw Error(ErrorKind::capability, "boundary check needs a commuting interaction");
  const int d = phi.lattice.d;
  const double strength = phi.strength();
  const bool closed_kappa = group && group->abelian && phi.lattice.kind == Lattice::Kind::torus_edges;

  BoundaryCheck out;
  const std::vector<std::pair<std::string, Sites>> regions = {{"AB", region_union(p.a, p.b)},
                                                              {"B", p.b},
                                                              {"BC", region_union(p.b, p.c)},
                                                              {"ABC", region_union(region_union(p.a, p.b), p.c)}};
  for (const auto& [name, r] : regions) {
    if (r.empty()) {
      out.q_norms[name] = 0.0;
      out.kappas[name] = 1.0;
      continue;
    }
    const Sites closure = phi.closure(r);
    const Sites outer = region_minus(closure, r);
    if (ipow(d, static_cast<int>(closure.size())) > kDenseStateDim)
      throw Error(ErrorKind::capacity, "closure of " + name + " is too large for the dense boundary check");
    const Mat w = gibbs_weight(phi.boundary_hamiltonian(r), beta);
    const Mat tr = partial_trace(w, closure, r, d);
    double kappa = 0.0;
    if (closed_kappa) {
      kappa = qd_marginal_closed(phi.lattice, *group, beta, r).kappa;
      // the interaction holds -A_s -B_p: the product weight e^{beta A} is exactly e^{-beta H}
    } else {
      kappa = tr.trace().real() / static_cast<double>(tr.rows());
    }
    const Mat q = tr / kappa - identity(tr.rows());
    const double qn = op_norm(q);
    out.q_norms[name] = qn;
    out.kappas[name] = kappa;
    out.epsilon = std::max(out.epsilon, qn * std::exp(2.0 * beta * static_cast<double>(outer.size()) * strength));
  }
  const double lhs = out.kappas["AB"] * out.kappas["BC"];
  const double rhs = out.kappas["B"] * out.kappas["ABC"];
  out.kappa_residual = std::abs(lhs - rhs) / std::abs(rhs);
  out.applicable = out.epsilon < 1.0;
  if (out.applicable && out.epsilon > 0.0) out.delta_bound = sufficient_condition_delta(out.epsilon);
  if (out.applicable && out.epsilon == 0.0) out.delta_bound = 0.0;
  return out;
}

}  // namespace pgap
