// Score functions built from study summaries and their inversion into
// convex confidence intervals / regions, plus simultaneous CIs and the
// adaptive drop-worst-study procedure.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "heavytail/combine.hpp"
#include "heavytail/nulldist.hpp"
#include "heavytail/optimize.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

struct StudySummary1D {
  double theta_hat = 0.0;
  double sigma_hat = 1.0;
  double df = std::numeric_limits<double>::infinity();  // inf => normal
};

struct SubStudy {
  Eigen::VectorXd xi;     // d_j
  Eigen::MatrixXd sigma;  // d_j x d_j SPD (covariance of xi)
  Eigen::MatrixXd P;      // d_j x d projection
  double df = std::numeric_limits<double>::infinity();
};

struct IntervalResult {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
  static IntervalResult make_empty() { return {}; }
  static IntervalResult interval(double lo, double hi) {
    return {false, lo, hi};
  }
};

namespace detail {

inline SumKind sum_kind_of(CombinerKind kind) {
  if (kind == CombinerKind::HCCT) return SumKind::HalfCauchySum;
  if (kind == CombinerKind::EHMP) return SumKind::ParetoSum;
  throw domain_error("score inversion supports HCCT and EHMP only");
}

// F_nu^{-1}(1-p) for the combiner's reference distribution, guarded so
// vanishing p-values map to a huge but finite score contribution.
inline double combiner_upper_quantile(CombinerKind kind, double p) {
  p = std::min(std::max(p, 1e-300), 1.0);
  if (kind == CombinerKind::HCCT)
    return dist_upper_quantile(DistKind::half_cauchy(), p);
  if (kind == CombinerKind::EHMP)
    return dist_upper_quantile(DistKind::pareto11(), p);
  if (kind == CombinerKind::CCT)
    return dist_upper_quantile(DistKind::cauchy(), p);
  throw domain_error("combiner_upper_quantile: additive combiners only");
}

// Two-sided p-value of a single 1-D study at candidate theta, evaluated
// through the survival branch so extreme z keeps full relative accuracy.
inline double study_pvalue_1d(const StudySummary1D& s, double theta) {
  if (!(s.sigma_hat > 0.0))
    throw domain_error("StudySummary1D: sigma_hat must be positive");
  const double z = std::fabs(s.theta_hat - theta) / s.sigma_hat;
  const DistKind ref = std::isinf(s.df) ? DistKind::normal()
                                        : DistKind::student_t(s.df);
  return std::min(2.0 * dist_survival(ref, z), 1.0);
}

inline void check_lengths(std::size_t m, const std::vector<double>& w,
                          const char* who) {
  if (m == 0) throw domain_error(std::string(who) + ": no studies");
  if (w.size() != m)
    throw domain_error(std::string(who) + ": weight length mismatch");
}

}  // namespace detail

inline double score_1d(double theta, const std::vector<StudySummary1D>& studies,
                       CombinerKind kind, const std::vector<double>& w) {
  detail::check_lengths(studies.size(), w, "score_1d");
  double s = 0.0;
  for (std::size_t j = 0; j < studies.size(); ++j) {
    if (w[j] == 0.0) continue;
    s += w[j] * detail::combiner_upper_quantile(
                    kind, detail::study_pvalue_1d(studies[j], theta));
  }
  return s;
}

// Hotelling quadratic form (xi - P theta)' Sigma^{-1} (xi - P theta).
inline double quad_form(const SubStudy& s, const Eigen::VectorXd& theta) {
  if (s.P.cols() != theta.size() || s.P.rows() != s.xi.size() ||
      s.sigma.rows() != s.xi.size() || s.sigma.cols() != s.xi.size())
    throw domain_error("SubStudy: dimension mismatch");
  const Eigen::VectorXd r = s.xi - s.P * theta;
  Eigen::LLT<Eigen::MatrixXd> llt(s.sigma);
  if (llt.info() != Eigen::Success)
    throw domain_error("SubStudy: covariance is not positive definite");
  return r.dot(llt.solve(r));
}

inline double substudy_pvalue(const SubStudy& s, const Eigen::VectorXd& theta) {
  const double q = quad_form(s, theta);
  const int dj = static_cast<int>(s.xi.size());
  const DistKind ref =
      std::isinf(s.df) ? DistKind::chi2(dj)
                       : DistKind::hotelling_t2(dj, static_cast<int>(s.df));
  return dist_survival(ref, q);
}

inline double score_md(const Eigen::VectorXd& theta,
                       const std::vector<SubStudy>& substudies,
                       CombinerKind kind, const std::vector<double>& w) {
  detail::check_lengths(substudies.size(), w, "score_md");
  double s = 0.0;
  for (std::size_t j = 0; j < substudies.size(); ++j) {
    if (w[j] == 0.0) continue;
    s += w[j] * detail::combiner_upper_quantile(
                    kind, substudy_pvalue(substudies[j], theta));
  }
  return s;
}

// ---------------------------------------------------------------------------
// 1-D inversion
// ---------------------------------------------------------------------------

namespace detail {

// Given a convex h with minimum (t_min, h_min <= thr), find the two
// crossings of h == thr by geometric expansion plus Brent root-finding.
template <typename H>
IntervalResult convex_crossings(H&& h, double t_min, double h_min, double thr,
                                double step) {
  if (h_min > thr) return IntervalResult::make_empty();
  if (!(step > 0.0)) step = 1.0;
  auto g = [&](double t) { return h(t) - thr; };
  double ends[2];
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? -1.0 : 1.0;
    double lo = t_min, s = step;
    double hi = t_min + dir * s;
    int guard = 0;
    while (g(hi) <= 0.0 && ++guard < 60) {
      lo = hi;
      s *= 2.0;
      hi = t_min + dir * s;
    }
    if (guard >= 60)
      throw domain_error("invert: score fails to cross the threshold");
    // Convexity: g < 0 at lo, > 0 at hi, single crossing between.
    ends[side] = brent_root(g, std::min(lo, hi), std::max(lo, hi),
                            1e-10 * (std::fabs(t_min) + s + 1.0));
  }
  return IntervalResult::interval(ends[0], ends[1]);
}

// Minimize a convex scalar function by downhill bracket expansion from t0.
template <typename H>
MinResult convex_min_scalar(H&& h, double t0, double step) {
  if (!(step > 0.0)) step = 1.0;
  double a = t0 - step, b = t0 + step;
  double fa = h(a), f0 = h(t0), fb = h(b);
  int guard = 0;
  while (!(f0 <= fa && f0 <= fb) && ++guard < 200) {
    if (fa < fb) {
      b = t0; fb = f0;
      t0 = a; f0 = fa;
      a = t0 - (b - t0) * 2.0;
      fa = h(a);
    } else {
      a = t0; fa = f0;
      t0 = b; f0 = fb;
      b = t0 + (t0 - a) * 2.0;
      fb = h(b);
    }
  }
  return brent_min(h, a, b, 1e-10);
}

}  // namespace detail

inline double invert_threshold(CombinerKind kind, const std::vector<double>& w,
                               double level, std::size_t exact_m_max = 1000) {
  NullDistribution dist(detail::sum_kind_of(kind), Weights(w), exact_m_max);
  return dist.quantile(level);
}

// Inversion against a precomputed null quantile (reused across replicates).
inline IntervalResult invert_1d_at_threshold(
    const std::vector<StudySummary1D>& studies, CombinerKind kind,
    const std::vector<double>& w, double thr) {
  detail::check_lengths(studies.size(), w, "invert_1d");
  auto h = [&](double t) { return score_1d(t, studies, kind, w); };

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, smax = 0.0;
  for (std::size_t j = 0; j < studies.size(); ++j) {
    if (w[j] == 0.0) continue;
    lo = std::min(lo, studies[j].theta_hat);
    hi = std::max(hi, studies[j].theta_hat);
    smax = std::max(smax, studies[j].sigma_hat);
  }
  // Convexity puts the minimizer inside the hull of the estimates.
  MinResult m = lo < hi ? brent_min(h, lo, hi, 1e-10)
                        : MinResult{lo, h(lo)};
  if (m.fx > thr) return IntervalResult::make_empty();
  const double step = std::max(hi - lo, smax);
  return detail::convex_crossings(h, m.x, m.fx, thr, step);
}

inline IntervalResult invert_1d(const std::vector<StudySummary1D>& studies,
                                CombinerKind kind, const std::vector<double>& w,
                                double level, std::size_t exact_m_max = 1000) {
  if (!(level > 0.0) || !(level < 1.0))
    throw domain_error("invert_1d: level must lie in (0,1)");
  const double thr = invert_threshold(kind, w, level, exact_m_max);
  return invert_1d_at_threshold(studies, kind, w, thr);
}

// Grid-scan inversion of the (non-convex) CCT score; returns the maximal
// runs of grid points whose score stays at or below the Cauchy threshold.
inline std::vector<std::pair<double, double>> cct_invert_grid(
    const std::vector<StudySummary1D>& studies, const std::vector<double>& w,
    double level, double lo, double hi, int n) {
  detail::check_lengths(studies.size(), w, "cct_invert_grid");
  if (n < 1000) throw domain_error("cct_invert_grid: need n >= 1000");
  if (!(lo < hi)) throw domain_error("cct_invert_grid: need lo < hi");
  const double thr = dist_quantile(DistKind::cauchy(), level);
  auto score = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < studies.size(); ++j) {
      if (w[j] == 0.0) continue;
      s += w[j] * detail::combiner_upper_quantile(
                      CombinerKind::CCT,
                      detail::study_pvalue_1d(studies[j], t));
    }
    return s;
  };
  std::vector<std::pair<double, double>> runs;
  bool inside = false;
  double start = 0.0, last = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const bool in = score(t) <= thr;
    if (in && !inside) { inside = true; start = t; }
    if (in) last = t;
    if (!in && inside) { inside = false; runs.emplace_back(start, last); }
  }
  if (inside) runs.emplace_back(start, last);
  return runs;
}

// ---------------------------------------------------------------------------
// Multivariate regions
// ---------------------------------------------------------------------------

enum class RegionStatus { NonEmpty, Empty };

struct RegionHandle {
  std::vector<SubStudy> substudies;
  std::vector<double> weights;
  CombinerKind kind = CombinerKind::HCCT;
  double level = 0.95;
  double threshold = 0.0;
  double min_score = 0.0;
  Eigen::VectorXd minimizer;  // unconstrained argmin of the score
  RegionStatus status = RegionStatus::Empty;
  bool bounded = false;
  int d = 0;
  std::size_t exact_m_max = 1000;

  bool nonempty() const { return status == RegionStatus::NonEmpty; }
  const Eigen::VectorXd& point_estimate() const {
    if (!nonempty())
      throw domain_error("RegionHandle: empty region has no point estimate");
    return minimizer;
  }
  double score(const Eigen::VectorXd& theta) const {
    return score_md(theta, substudies, kind, weights);
  }
};

namespace detail {

inline bool spans_full_space(const std::vector<SubStudy>& subs,
                             const std::vector<double>& w, int d) {
  int rows = 0;
  for (std::size_t j = 0; j < subs.size(); ++j)
    if (w[j] > 0.0) rows += static_cast<int>(subs[j].P.rows());
  if (rows < d) return false;
  Eigen::MatrixXd stacked(rows, d);
  int at = 0;
  for (std::size_t j = 0; j < subs.size(); ++j) {
    if (w[j] <= 0.0) continue;
    stacked.middleRows(at, subs[j].P.rows()) = subs[j].P;
    at += static_cast<int>(subs[j].P.rows());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  qr.setThreshold(1e-10);
  return qr.rank() == d;
}

inline Eigen::VectorXd gls_start(const std::vector<SubStudy>& subs,
                                 const std::vector<double>& w, int d) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (std::size_t j = 0; j < subs.size(); ++j) {
    if (w[j] <= 0.0) continue;
    Eigen::LLT<Eigen::MatrixXd> llt(subs[j].sigma);
    if (llt.info() != Eigen::Success)
      throw domain_error("build_region: covariance not positive definite");
    A += subs[j].P.transpose() * llt.solve(subs[j].P);
    rhs += subs[j].P.transpose() * llt.solve(subs[j].xi);
  }
  // Ridge keeps rank-deficient (unbounded-region) starts well-defined.
  A.diagonal().array() += 1e-10 * (A.trace() / d + 1.0);
  return A.ldlt().solve(rhs);
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

inline RegionHandle build_region(std::vector<SubStudy> substudies,
                                 CombinerKind kind, std::vector<double> w,
                                 double level,
                                 std::size_t exact_m_max = 1000) {
  detail::check_lengths(substudies.size(), w, "build_region");
  if (!(level > 0.0) || !(level < 1.0))
    throw domain_error("build_region: level must lie in (0,1)");
  const int d = static_cast<int>(substudies.front().P.cols());
  for (const auto& s : substudies) {
    if (s.P.cols() != d) throw domain_error("build_region: mixed dimensions");
    if (!std::isinf(s.df) && s.df < s.xi.size())
      throw domain_error("build_region: df must be >= sub-study dimension");
  }

  RegionHandle r;
  r.kind = kind;
  r.level = level;
  r.d = d;
  r.exact_m_max = exact_m_max;
  r.bounded = detail::spans_full_space(substudies, w, d);
  r.threshold = invert_threshold(kind, w, level, exact_m_max);

  const Eigen::VectorXd x0 = detail::gls_start(substudies, w, d);
  auto f = [&](const std::vector<double>& x) {
    return score_md(detail::to_eigen(x), substudies, kind, w);
  };
  auto res = minimize_df(f, detail::to_std(x0), 1e-9, 20000);
  r.min_score = res.fx;
  r.minimizer = detail::to_eigen(res.x);
  r.status = res.fx <= r.threshold ? RegionStatus::NonEmpty
                                   : RegionStatus::Empty;
  r.substudies = std::move(substudies);
  r.weights = std::move(w);
  return r;
}

inline bool contains(const RegionHandle& r, const Eigen::VectorXd& theta) {
  return r.score(theta) <= r.threshold;
}

inline std::vector<Eigen::Vector2d> contour_2d(const RegionHandle& r,
                                               int n_angles = 256) {
  if (r.d != 2) throw domain_error("contour_2d: region must be 2-D");
  if (!r.nonempty()) throw domain_error("contour_2d: region is empty");
  if (!r.bounded) throw domain_error("contour_2d: region is unbounded");
  if (n_angles < 8) throw domain_error("contour_2d: need >= 8 angles");
  const Eigen::VectorXd c = r.minimizer;
  std::vector<Eigen::Vector2d> boundary;
  boundary.reserve(n_angles);
  for (int i = 0; i < n_angles; ++i) {
    const double ang = 2.0 * pi * i / n_angles;
    Eigen::Vector2d u(std::cos(ang), std::sin(ang));
    auto g = [&](double rad) {
      return r.score(c + rad * Eigen::VectorXd(u)) - r.threshold;
    };
    double hi = 1.0;
    int guard = 0;
    while (g(hi) <= 0.0 && ++guard < 200) hi *= 2.0;
    if (guard >= 200) throw domain_error("contour_2d: ray never exits region");
    const double rad = brent_root(g, 0.0, hi, 1e-10 * (hi + 1.0));
    boundary.emplace_back(c(0) + rad * u(0), c(1) + rad * u(1));
  }
  return boundary;
}

// ---------------------------------------------------------------------------
// Slices through higher-dimensional regions
// ---------------------------------------------------------------------------

namespace detail {

inline void check_slice_coords(const RegionHandle& r,
                               const std::map<int, double>& fixed,
                               const std::vector<int>& free_coords) {
  if (fixed.size() + free_coords.size() != static_cast<std::size_t>(r.d))
    throw domain_error("slice: fixed plus free coordinates must cover d");
  std::vector<bool> seen(r.d, false);
  auto mark = [&](int c) {
    if (c < 0 || c >= r.d || seen[c])
      throw domain_error("slice: invalid or repeated coordinate");
    seen[c] = true;
  };
  for (const auto& kv : fixed) mark(kv.first);
  for (int c : free_coords) mark(c);
}

inline Eigen::VectorXd embed_slice(const RegionHandle& r,
                                   const std::map<int, double>& fixed,
                                   const std::vector<int>& free_coords,
                                   const Eigen::VectorXd& free_vals) {
  Eigen::VectorXd theta(r.d);
  for (const auto& kv : fixed) theta(kv.first) = kv.second;
  for (std::size_t i = 0; i < free_coords.size(); ++i)
    theta(free_coords[i]) = free_vals(static_cast<Eigen::Index>(i));
  return theta;
}

}  // namespace detail

inline IntervalResult slice_interval(const RegionHandle& r,
                                     const std::map<int, double>& fixed,
                                     int free_coord) {
  detail::check_slice_coords(r, fixed, {free_coord});
  auto h = [&](double t) {
    Eigen::VectorXd v(1);
    v(0) = t;
    return r.score(detail::embed_slice(r, fixed, {free_coord}, v));
  };
  const double t0 = r.minimizer(free_coord);
  auto m = detail::convex_min_scalar(h, t0, 1.0);
  if (m.fx > r.threshold) return IntervalResult::make_empty();
  return detail::convex_crossings(h, m.x, m.fx, r.threshold, 1.0);
}

inline std::vector<Eigen::Vector2d> slice_contour(
    const RegionHandle& r, const std::map<int, double>& fixed, int free_a,
    int free_b, int n_angles = 256) {
  detail::check_slice_coords(r, fixed, {free_a, free_b});
  auto h = [&](const Eigen::Vector2d& uv) {
    return r.score(detail::embed_slice(r, fixed, {free_a, free_b}, uv));
  };
  // Minimize over the slice plane starting at the projected minimizer.
  auto f = [&](const std::vector<double>& x) {
    return h(Eigen::Vector2d(x[0], x[1]));
  };
  auto res = minimize_df(f, {r.minimizer(free_a), r.minimizer(free_b)}, 1e-9,
                         20000);
  if (res.fx > r.threshold) return {};
  const Eigen::Vector2d c(res.x[0], res.x[1]);
  std::vector<Eigen::Vector2d> boundary;
  boundary.reserve(n_angles);
  for (int i = 0; i < n_angles; ++i) {
    const double ang = 2.0 * pi * i / n_angles;
    const Eigen::Vector2d u(std::cos(ang), std::sin(ang));
    auto g = [&](double rad) {
      return h(c + rad * u) - r.threshold;
    };
    double hi = 1.0;
    int guard = 0;
    while (g(hi) <= 0.0 && ++guard < 200) hi *= 2.0;
    if (guard >= 200)
      throw domain_error("slice_contour: ray never exits region");
    const double rad = brent_root(g, 0.0, hi, 1e-10 * (hi + 1.0));
    boundary.emplace_back(c + rad * u);
  }
  return boundary;
}

inline IntervalResult simultaneous_ci(const RegionHandle& r,
                                      const Eigen::VectorXd& b) {
  if (b.size() != r.d) throw domain_error("simultaneous_ci: bad direction");
  if (b.norm() == 0.0) throw domain_error("simultaneous_ci: zero direction");
  if (!r.nonempty()) return IntervalResult::make_empty();
  if (!r.bounded)
    throw domain_error("simultaneous_ci: region is unbounded");
  auto score = [&](const std::vector<double>& x) {
    return r.score(detail::to_eigen(x));
  };
  const double lambda = std::exp(20.0);
  const auto x0 = detail::to_std(r.minimizer);
  const auto bv = detail::to_std(b);
  const double lo = penalty_extreme(Direction::Min, bv, score, r.threshold,
                                    lambda, x0);
  const double hi = penalty_extreme(Direction::Max, bv, score, r.threshold,
                                    lambda, x0);
  return IntervalResult::interval(std::min(lo, hi), std::max(lo, hi));
}

// ---------------------------------------------------------------------------
// Lower bound, heterogeneity scores, adaptive procedure
// ---------------------------------------------------------------------------

// Sum_j w_j |theta_j - median| / sigma_j with the lower weighted median of
// the discrete distribution P(theta_j) proportional to w_j / sigma_j.
inline double lower_bound_stat(const std::vector<StudySummary1D>& studies,
                               const std::vector<double>& w) {
  detail::check_lengths(studies.size(), w, "lower_bound_stat");
  std::vector<std::size_t> idx(studies.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return studies[a].theta_hat < studies[b].theta_hat;
  });
  double total = 0.0;
  for (std::size_t j = 0; j < studies.size(); ++j)
    total += w[j] / studies[j].sigma_hat;
  double cum = 0.0, med = studies[idx.back()].theta_hat;
  for (std::size_t j : idx) {
    cum += w[j] / studies[j].sigma_hat;
    if (cum >= total / 2.0) {
      med = studies[j].theta_hat;
      break;
    }
  }
  double s = 0.0;
  for (std::size_t j = 0; j < studies.size(); ++j)
    s += w[j] * std::fabs(studies[j].theta_hat - med) / studies[j].sigma_hat;
  return s;
}

inline std::vector<double> heterogeneity_scores(
    const std::vector<SubStudy>& substudies, const Eigen::VectorXd& theta_fit) {
  std::vector<double> q;
  q.reserve(substudies.size());
  for (const auto& s : substudies) q.push_back(quad_form(s, theta_fit));
  return q;
}

inline std::vector<double> heterogeneity_scores(
    const std::vector<StudySummary1D>& studies, double theta_fit) {
  std::vector<double> q;
  q.reserve(studies.size());
  for (const auto& s : studies) {
    const double z = (s.theta_hat - theta_fit) / s.sigma_hat;
    q.push_back(z * z);
  }
  return q;
}

inline SubStudy substudy_from_1d(const StudySummary1D& s) {
  SubStudy out;
  out.xi = Eigen::VectorXd::Constant(1, s.theta_hat);
  out.sigma = Eigen::MatrixXd::Constant(1, 1, s.sigma_hat * s.sigma_hat);
  out.P = Eigen::MatrixXd::Constant(1, 1, 1.0);
  out.df = s.df;
  return out;
}

struct AdaptiveResult {
  RegionHandle region;
  std::vector<std::size_t> dropped;  // original sub-study indices, drop order
};

// Repeatedly zero the weight of the highest-heterogeneity sub-study until
// the region is nonempty, renormalizing the kept weights proportionally and
// recomputing the null quantile for each new weight vector.
inline AdaptiveResult adaptive_nonempty(const std::vector<SubStudy>& substudies,
                                        CombinerKind kind,
                                        const std::vector<double>& w0,
                                        double level,
                                        std::size_t exact_m_max = 1000) {
  detail::check_lengths(substudies.size(), w0, "adaptive_nonempty");
  const int d = static_cast<int>(substudies.front().P.cols());
  std::vector<double> w(w0);
  AdaptiveResult out;
  for (;;) {
    out.region = build_region(substudies, kind, w, level, exact_m_max);
    if (out.region.nonempty()) return out;
    const auto q = heterogeneity_scores(substudies, out.region.minimizer);
    std::size_t worst = substudies.size();
    double worst_q = -1.0;
    for (std::size_t j = 0; j < q.size(); ++j)
      if (w[j] > 0.0 && q[j] > worst_q) {
        worst_q = q[j];
        worst = j;
      }
    if (worst == substudies.size())
      throw domain_error("adaptive_nonempty: no droppable study left");
    std::vector<double> trial(w);
    trial[worst] = 0.0;
    if (out.region.bounded &&
        !detail::spans_full_space(substudies, trial, d)) {
      std::string msg = "adaptive_nonempty: dropping study " +
                        std::to_string(worst) +
                        " breaks the span condition; dropped so far:";
      for (std::size_t j : out.dropped) msg += " " + std::to_string(j);
      throw domain_error(msg);
    }
    double kept = 0.0;
    for (double v : trial) kept += v;
    if (kept <= 0.0)
      throw domain_error("adaptive_nonempty: all weights eliminated");
    for (double& v : trial) v /= kept;
    w = std::move(trial);
    out.dropped.push_back(worst);
  }
}

inline AdaptiveResult adaptive_nonempty(
    const std::vector<StudySummary1D>& studies, CombinerKind kind,
    const std::vector<double>& w0, double level,
    std::size_t exact_m_max = 1000) {
  std::vector<SubStudy> subs;
  subs.reserve(studies.size());
  for (const auto& s : studies) subs.push_back(substudy_from_1d(s));
  return adaptive_nonempty(subs, kind, w0, level, exact_m_max);
}

}  // namespace heavytail
