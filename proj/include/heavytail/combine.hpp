// Combination statistics and global p-values for heavy-tail p-value
// combiners (half-Cauchy, Pareto/harmonic-mean, Cauchy) and the classic
// baselines (Fisher, Stouffer, Bonferroni, Simes).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "heavytail/nulldist.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

enum class CombinerKind { HCCT, EHMP, CCT, Fisher, Stouffer, Bonferroni, Simes };

inline const char* combiner_name(CombinerKind k) {
  switch (k) {
    case CombinerKind::HCCT: return "hcct";
    case CombinerKind::EHMP: return "ehmp";
    case CombinerKind::CCT: return "cct";
    case CombinerKind::Fisher: return "fisher";
    case CombinerKind::Stouffer: return "stouffer";
    case CombinerKind::Bonferroni: return "bonferroni";
    case CombinerKind::Simes: return "simes";
  }
  return "?";
}

namespace detail {

inline void check_pvalues(const std::vector<double>& p,
                          const std::vector<double>& w) {
  if (p.empty()) throw domain_error("combine: empty p-value vector");
  if (p.size() != w.size())
    throw domain_error("combine: p-value / weight length mismatch");
  for (double pj : p)
    if (!(pj >= 0.0) || !(pj <= 1.0))
      throw domain_error("combine: p-values must lie in [0,1]");
}

inline bool equal_weights(const std::vector<double>& w) {
  const double ref = 1.0 / static_cast<double>(w.size());
  for (double wj : w)
    if (std::fabs(wj - ref) > 1e-9) return false;
  return true;
}

inline void require_equal_weights(const std::vector<double>& w,
                                  const char* kind) {
  if (!equal_weights(w))
    throw domain_error(std::string("combine: ") + kind +
                       " supports equal weights only");
}

inline double normal_survival(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

}  // namespace detail

// Per-study transform summed by the additive combiners. p=0 maps to +inf.
inline double combiner_term(CombinerKind kind, double p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case CombinerKind::HCCT:
      return p <= 0.0 ? inf : 1.0 / std::tan(pi * p / 2.0);
    case CombinerKind::EHMP:
      return p <= 0.0 ? inf : 1.0 / p;
    case CombinerKind::CCT:
      if (p <= 0.0) return inf;
      if (p >= 1.0) return -inf;
      return 1.0 / std::tan(pi * p);
    case CombinerKind::Fisher:
      return p <= 0.0 ? inf : -2.0 * std::log(p);
    case CombinerKind::Stouffer:
      if (p <= 0.0) return inf;
      if (p >= 1.0) return -inf;
      return detail::normal_quantile(1.0 - p);
    default:
      throw domain_error("combiner_term: order-statistic combiner");
  }
}

inline double statistic(CombinerKind kind, const std::vector<double>& p,
                        const std::vector<double>& w) {
  detail::check_pvalues(p, w);
  const std::size_t m = p.size();
  switch (kind) {
    case CombinerKind::Bonferroni: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        if (w[j] <= 0.0) continue;
        best = std::min(best, p[j] / w[j]);
      }
      return best;
    }
    case CombinerKind::Simes: {
      detail::require_equal_weights(w, "Simes");
      std::vector<double> q(p);
      std::sort(q.begin(), q.end());
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k)
        best = std::min(best, static_cast<double>(m) / (k + 1.0) * q[k]);
      return best;
    }
    default:
      break;
  }
  if (kind == CombinerKind::Fisher) detail::require_equal_weights(w, "Fisher");
  // Any p_j = 0 dominates: the statistic is +inf regardless of other terms.
  bool has_pos_inf = false, has_neg_inf = false;
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double wj = kind == CombinerKind::Fisher ? 1.0 : w[j];
    if (wj == 0.0) continue;
    const double t = combiner_term(kind, p[j]);
    if (std::isinf(t)) {
      (t > 0 ? has_pos_inf : has_neg_inf) = true;
    } else {
      s += wj * t;
    }
  }
  if (has_pos_inf) return std::numeric_limits<double>::infinity();
  if (has_neg_inf) return -std::numeric_limits<double>::infinity();
  return s;
}

inline double global_pvalue(CombinerKind kind, const std::vector<double>& p,
                            const std::vector<double>& w,
                            std::size_t exact_m_max = 1000) {
  const double t = statistic(kind, p, w);
  double gp;
  switch (kind) {
    case CombinerKind::HCCT:
    case CombinerKind::EHMP: {
      if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
      const auto sk = kind == CombinerKind::HCCT ? SumKind::HalfCauchySum
                                                 : SumKind::ParetoSum;
      NullDistribution dist(sk, Weights(w), exact_m_max);
      gp = dist.survival(t);
      break;
    }
    case CombinerKind::CCT:
      if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
      gp = 0.5 - std::atan(t) / pi;
      break;
    case CombinerKind::Fisher: {
      if (std::isinf(t)) return 0.0;
      gp = detail::gamma_q(static_cast<double>(p.size()), t / 2.0);
      break;
    }
    case CombinerKind::Stouffer: {
      if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
      double ss = 0.0;
      for (double wj : w) ss += wj * wj;
      gp = detail::normal_survival(t / std::sqrt(ss));
      break;
    }
    case CombinerKind::Bonferroni:
    case CombinerKind::Simes:
      gp = t;  // the order-statistic functionals already are p-values
      break;
    default:
      throw domain_error("global_pvalue: unknown combiner");
  }
  return std::min(std::max(gp, 0.0), 1.0);
}

inline bool reject(CombinerKind kind, const std::vector<double>& p,
                   const std::vector<double>& w, double alpha,
                   std::size_t exact_m_max = 1000) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw domain_error("reject: alpha must lie in (0,1)");
  return global_pvalue(kind, p, w, exact_m_max) <= alpha;
}

}  // namespace heavytail
