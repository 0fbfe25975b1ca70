#include "pgap/mixing.hpp"

#include "pgap/krylov.hpp"
#include "pgap/purified.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pgap {

namespace {

std::string list_sites(const Sites& s) {
  std::ostringstream os;
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  return os.str();
}

std::string format_ranges(const Sites& s) {
  std::ostringstream os;
  size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[j] + 1) ++j;
    os << (first ? "" : ",") << s[i];
    if (j > i) os << "-" << s[j];
    first = false;
    i = j + 1;
  }
  return os.str();
}

}  // namespace

void Partition::validate(int site_count) const {
  const Sites* regions[4] = {&a, &b, &c, &d};
  const char* names = "ABCD";
  for (int i = 0; i < 4; ++i) {
    try {
      validate_region(*regions[i], site_count);
    } catch (const Error& e) {
      throw Error(ErrorKind::partition, std::string("region ") + names[i] + ": " + e.what());
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Sites ov = region_intersection(*regions[i], *regions[j]);
      if (!ov.empty())
        throw Error(ErrorKind::partition, std::string("regions ") + names[i] + " and " + names[j] + " overlap at sites " + list_sites(ov));
    }
  Sites all = region_union(region_union(a, b), region_union(c, d));
  Sites missing = complement(all, site_count);
  if (!missing.empty()) throw Error(ErrorKind::partition, "sites not covered: " + list_sites(missing));
  if (a.empty() || c.empty()) throw Error(ErrorKind::partition, "A and C must be nonempty");
}

std::string Partition::format() const {
  return "A=" + format_ranges(a) + ";B=" + format_ranges(b) + ";C=" + format_ranges(c) + ";D=" + format_ranges(d);
}

namespace {

// Marginals of a partition, all embedded on ACD.
struct Marginals {
  Sites acd, ad, cd;
  int d = 2;
  Mat s_acd;     // sigma_ACD
  Mat m_ad;      // sigma_AD on AD
  Mat m_cd;      // sigma_CD on CD
  Mat e_ad;      // embedded on ACD
  Mat e_cd;
  Mat e_d_inv;   // sigma_D^{-1} embedded
  Mat e_d;
  SplitIndex ad_split;  // sub = AD inside ACD
  SplitIndex cd_split;  // sub = CD inside ACD
};

Marginals marginals(const DensityMatrix& sigma, const Partition& p) {
  p.validate(sigma.n_sites());
  Marginals m;
  m.d = sigma.local_dim();
  m.acd = region_union(region_union(p.a, p.c), p.d);
  m.ad = region_union(p.a, p.d);
  m.cd = region_union(p.c, p.d);
  m.s_acd = sigma.marginal(m.acd);
  m.m_ad = partial_trace(m.s_acd, m.acd, p.c, m.d);
  m.m_cd = partial_trace(m.s_acd, m.acd, p.a, m.d);
  Mat sd = partial_trace(m.m_ad, m.ad, p.a, m.d);
  m.ad_split = split_index(m.acd, m.ad, m.d);
  m.cd_split = split_index(m.acd, m.cd, m.d);
  m.e_ad = embed_split(m.m_ad, m.ad_split);
  m.e_cd = embed_split(m.m_cd, m.cd_split);
  m.e_d = embed(sd, p.d, m.acd, m.d);
  m.e_d_inv = embed(pd_inverse(sd, 1e-14), p.d, m.acd, m.d);
  return m;
}

Mat lower_cholesky(const Mat& m, bool& jittered) {
  Eigen::LLT<Mat> llt(hermitize(m));
  if (llt.info() == Eigen::Success) return llt.matrixL();
  jittered = true;
  const double shift = 1e-14 * std::max(1.0, m.trace().real());
  Eigen::LLT<Mat> retry(hermitize(m) + shift * identity(m.rows()));
  if (retry.info() != Eigen::Success) throw Error(ErrorKind::rank, "GNS Gram matrix is not positive definite");
  return retry.matrixL();
}

struct BilinearNorm {
  double value = 0.0;
  Vec right, left;
  double residual = 0.0;
  std::string method;
};

// Norm of T(R) = Pq Tr_A[(Pr R (x) 1_C) K] from operators on AD to operators on CD.
BilinearNorm bilinear_norm(const Marginals& m, const Mat& k, const OpMap& pr, const OpMap& pq, const DeltaOptions& opts) {
  const long long dad = m.ad_split.sub_dim, dcd = m.cd_split.sub_dim;
  const long long nin = dad * dad, nout = dcd * dcd;
  if (nin > opts.basis_cap || nout > opts.basis_cap)
    throw Error(ErrorKind::capacity, "operator basis on AD or CD over cap; use the projector route");
  const Mat kd = k.adjoint();
  LinearMap t = [&](const Vec& v) {
    Mat r = unvec(v, dad);
    if (pr) r = pr(r);
    Mat out = trace_rest(embed_split(r, m.ad_split) * k, m.cd_split);
    if (pq) out = pq(out);
    return vec(out);
  };
  LinearMap tadj = [&](const Vec& v) {
    Mat q = unvec(v, dcd);
    if (pq) q = pq(q);
    Mat out = trace_rest(embed_split(q, m.cd_split) * kd, m.ad_split);
    if (pr) out = pr(out);
    return vec(out);
  };
  BilinearNorm b;
  if (nin <= opts.dense_cap && nout <= opts.dense_cap) {
    Mat tm = materialize(t, nin, nout);
    Eigen::JacobiSVD<Mat> svd(tm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    b.value = svd.singularValues()(0);
    b.right = svd.matrixV().col(0);
    b.left = svd.matrixU().col(0);
    b.method = "dense-svd";
    return b;
  }
  NormResult nr = map_norm(t, tadj, nin, nout, 1e-11, 3, opts.seed);
  b.value = nr.value;
  b.right = nr.right;
  b.left = nr.left;
  b.residual = nr.residual;
  b.method = "dilation-lanczos";
  return b;
}

// relabel a marginal as a standalone state on sites 0..k-1
DensityMatrix sub_state(const Mat& rho, int k, int d) { return DensityMatrix(rho / rho.trace().real(), k, d, 1e-14); }

Sites positions(const Sites& sub, const Sites& sup) {
  Sites out;
  for (int s : sub) out.push_back(static_cast<int>(std::lower_bound(sup.begin(), sup.end(), s) - sup.begin()));
  return out;
}

}  // namespace

MixingReport delta_direct(const DensityMatrix& sigma, const Partition& p, const DeltaOptions& opts) {
  Marginals m = marginals(sigma, p);
  bool jitter = false;
  Mat lad = lower_cholesky(m.m_ad, jitter);
  Mat lcd = lower_cholesky(m.m_cd, jitter);
  Mat lad_inv = lad.triangularView<Eigen::Lower>().solve(identity(lad.rows()));
  Mat lcd_inv = lcd.triangularView<Eigen::Lower>().solve(identity(lcd.rows()));
  Mat x = m.s_acd - m.e_ad * m.e_d_inv * m.e_cd;
  Mat k = embed_split(lad_inv, m.ad_split) * x * embed_split(Mat(lcd_inv.adjoint()), m.cd_split);
  BilinearNorm b = bilinear_norm(m, k, {}, {}, opts);
  MixingReport r;
  r.delta = b.value;
  r.method = b.method + (jitter ? "+jitter" : "");
  r.residual = b.residual;
  const long long dad = lad.rows(), dcd = lcd.rows();
  Mat rh = unvec(b.right, dad), qh = unvec(b.left, dcd);
  r.r_ad = rh * lad_inv;
  r.q_cd = qh * lcd_inv;
  return r;
}

double delta_constrained(const DensityMatrix& sigma, const Partition& p, const DeltaOptions& opts) {
  Marginals m = marginals(sigma, p);
  const int kad = static_cast<int>(m.ad.size()), kcd = static_cast<int>(m.cd.size());
  DensityMatrix sad = sub_state(m.m_ad, kad, m.d);
  DensityMatrix scd = sub_state(m.m_cd, kcd, m.d);
  Mat k = embed_split(sad.inv_sqrt(), m.ad_split) * m.s_acd * embed_split(scd.inv_sqrt(), m.cd_split);
  auto ctx_ad = std::make_shared<PurifiedContext>(sad);
  auto ctx_cd = std::make_shared<PurifiedContext>(scd);
  const Sites a_pos = positions(p.a, m.ad), c_pos = positions(p.c, m.cd);
  OpMap pr = [ctx_ad, a_pos](const Mat& r) { return Mat(r - ctx_ad->project(a_pos, r)); };
  OpMap pq = [ctx_cd, c_pos](const Mat& q) { return Mat(q - ctx_cd->project(c_pos, q)); };
  return bilinear_norm(m, k, pr, pq, opts).value;
}

DeltaBounds delta_upper_bounds(const DensityMatrix& sigma, const Partition& p) {
  Marginals m = marginals(sigma, p);
  DeltaBounds b;
  const Mat y = m.e_ad * m.e_d_inv * m.e_cd;
  const Mat s_inv = pd_inverse(m.s_acd, 1e-14);
  const Mat id = identity(m.s_acd.rows());
  const double left = op_norm(id - y * s_inv);
  const double right = op_norm(id - s_inv * y);
  b.half_sum_upper = 0.5 * (left + right);
  if (p.d.empty()) b.d_empty_upper = left;
  b.marginal_commutator = std::max({op_norm(commutator(m.e_ad, m.e_d)), op_norm(commutator(m.e_ad, m.e_cd)),
                                    op_norm(commutator(m.e_d, m.e_cd))});
  if (b.marginal_commutator <= 1e-10) b.commuting_upper = 1.0 - 1.0 / op_norm(y * s_inv);
  b.corr_lower = p.d.empty() ? corr_lower(sigma, p.a, p.c) : 0.0;
  return b;
}

double corr_lower(const DensityMatrix& sigma, const Sites& a, const Sites& c, int ascent_rounds) {
  const int n = sigma.n_sites();
  validate_region(a, n);
  validate_region(c, n);
  if (!region_intersection(a, c).empty()) throw Error(ErrorKind::region, "A and C must be disjoint");
  const int d = sigma.local_dim();
  const Sites ac = region_union(a, c);
  const Mat rho = sigma.marginal(ac);
  const SplitIndex sa = split_index(ac, a, d), sc = split_index(ac, c, d);
  const Mat rho_a = trace_rest(rho, sa), rho_c = trace_rest(rho, sc);

  auto value = [&](const Mat& qa, const Mat& qc) {
    const Mat ea = embed_split(qa, sa), ec = embed_split(qc, sc);
    const cplx joint = (rho * ec * ea).trace();
    return std::abs(joint - (rho_c * qc).trace() * (rho_a * qa).trace());
  };
  auto unit_norm = [](std::vector<Mat> basis) {
    for (Mat& b : basis) b /= op_norm(b);
    return basis;
  };
  const std::vector<Mat> ba = unit_norm(herm_basis(static_cast<int>(a.size()), d));
  const std::vector<Mat> bc = unit_norm(herm_basis(static_cast<int>(c.size()), d));
  double best = 0.0;
  Mat qa = ba[0], qc = bc[0];
  for (size_t i = 1; i < ba.size(); ++i)
    for (size_t j = 1; j < bc.size(); ++j) {
      const double v = value(ba[i], bc[j]);
      if (v > best) {
        best = v;
        qa = ba[i];
        qc = bc[j];
      }
    }
  // best contraction against a fixed matrix: polar factor V U^dag of M = U S V^dag
  auto polar = [](const Mat& mm) {
    Eigen::JacobiSVD<Mat> svd(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return Mat(svd.matrixV() * svd.matrixU().adjoint());
  };
  for (int round = 0; round < ascent_rounds; ++round) {
    const Mat ea = embed_split(qa, sa);
    Mat mc = trace_rest(ea * rho, sc) - (rho_a * qa).trace() * rho_c;
    qc = polar(mc);
    const Mat ec = embed_split(qc, sc);
    Mat ma = trace_rest(rho * ec, sa) - (rho_c * qc).trace() * rho_a;
    qa = polar(ma);
    const double v = value(qa, qc);
    if (v <= best * (1 + 1e-13)) {
      best = std::max(best, v);
      break;
    }
    best = v;
  }
  return best;
}

Partition ring_shield_partition(int n, int a_start, int a_len, int i1_len, int c_len, ShieldD which) {
  const int i2_len = n - a_len - i1_len - c_len;
  if (a_len < 1 || c_len < 1 || i1_len < 1 || i2_len < 1)
    throw Error(ErrorKind::partition, "shielded ring geometry needs four nonempty arcs");
  auto arc = [n](int start, int len) {
    Sites s;
    for (int i = 0; i < len; ++i) s.push_back(((start + i) % n + n) % n);
    return normalize_region(s);
  };
  Partition p;
  p.a = arc(a_start, a_len);
  const Sites i1 = arc(a_start + a_len, i1_len);
  p.c = arc(a_start + a_len + i1_len, c_len);
  const Sites i2 = arc(a_start + a_len + i1_len + c_len, i2_len);
  switch (which) {
    case ShieldD::empty: p.b = region_union(i1, i2); break;
    case ShieldD::i1: p.d = i1; p.b = i2; break;
    case ShieldD::i2: p.d = i2; p.b = i1; break;
  }
  return p;
}

int shielding_length(int n, const Partition& p) {
  p.validate(n);
  // label runs around the ring: 0 = A, 1 = C, 2 = shield
  std::vector<int> label(n, 2);
  for (int s : p.a) label[s] = 0;
  for (int s : p.c) label[s] = 1;
  int start = 0;
  while (start < n && label[start] == label[(start + n - 1) % n]) ++start;
  if (start == n) throw Error(ErrorKind::partition, "ring is not split into arcs");
  std::vector<std::pair<int, Sites>> runs;
  for (int i = 0; i < n; ++i) {
    const int s = (start + i) % n;
    if (runs.empty() || runs.back().first != label[s]) runs.push_back({label[s], {}});
    runs.back().second.push_back(s);
  }
  int shields = 0, as = 0, cs = 0;
  std::vector<Sites> arcs;
  for (auto& r : runs) {
    if (r.first == 0) ++as;
    if (r.first == 1) ++cs;
    if (r.first == 2) {
      ++shields;
      arcs.push_back(normalize_region(r.second));
    }
  }
  if (runs.size() != 4 || as != 1 || cs != 1 || shields != 2)
    throw Error(ErrorKind::partition, "A and C must be arcs separated by two nonempty shielding arcs");
  if (!p.d.empty() && p.d != arcs[0] && p.d != arcs[1])
    throw Error(ErrorKind::partition, "D must be empty or one of the shielding arcs");
  return static_cast<int>(std::min(arcs[0].size(), arcs[1].size()));
}

std::vector<ScanRow> delta_decay_scan(const DensityMatrix& sigma, const std::vector<Partition>& partitions,
                                      const std::function<double(int)>& envelope) {
  std::vector<ScanRow> rows;
  for (const Partition& p : partitions) {
    ScanRow r;
    r.ell = shielding_length(sigma.n_sites(), p);
    r.partition = p.format();
    r.delta = delta_direct(sigma, p).delta;
    if (envelope) r.envelope = envelope(r.ell);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace pgap
