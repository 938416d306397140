#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "heavytail/optimize.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

// ---------------------------------------------------------------------------
// Combination weights: nonnegative, summing to one.
// ---------------------------------------------------------------------------

class Weights {
 public:
  explicit Weights(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty())
      throw domain_error("Weights: at least one weight required");
    double sum = 0.0;
    for (double w : values_) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw domain_error("Weights: entries must be finite and nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw domain_error("Weights: entries must sum to one");
    if (std::abs(sum - 1.0) > 1e-12)
      for (double& w : values_) w /= sum;
  }

  static Weights equal(std::size_t m) {
    return Weights(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  bool is_equal_weighted() const {
    for (double w : values_)
      if (std::abs(w - values_[0]) > 1e-12) return false;
    return true;
  }

 private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Exact (Laplace-inversion) and Landau-approximate null distribution of
// T = sum_j w_j X_j with X_j i.i.d. Half-Cauchy or Pareto(1,1).
// ---------------------------------------------------------------------------

enum class SumKind { HalfCauchySum, ParetoSum };
enum class EvalMode { Exact, Landau };

class NullDistribution {
 public:
  NullDistribution(SumKind kind, const Weights& w,
                   std::size_t exact_m_max = 1000)
      : kind_(kind) {
    for (double v : w.values())
      if (v > 0.0) weights_.push_back(v);
    if (weights_.empty())
      throw domain_error("NullDistribution: all weights are zero");
    mode_ = weights_.size() <= exact_m_max ? EvalMode::Exact : EvalMode::Landau;
    equal_weighted_ = true;
    for (double v : weights_)
      if (std::abs(v - weights_[0]) > 1e-14) {
        equal_weighted_ = false;
        break;
      }
  }

  SumKind kind() const { return kind_; }
  EvalMode mode() const { return mode_; }
  std::size_t effective_m() const { return weights_.size(); }

  double support_min() const {
    return kind_ == SumKind::HalfCauchySum ? 0.0 : 1.0;
  }

  /// Landau centering constant: (2/pi){-sum w log w + 1 - gamma} for the
  /// Half-Cauchy sum, {-sum w log w + 1 - gamma} for the Pareto sum.
  double hybrid_center() const {
    double entropy = 0.0;
    for (double w : weights_) entropy -= w * std::log(w);
    const double base = entropy + 1.0 - euler_gamma;
    return kind_ == SumKind::HalfCauchySum ? (2.0 / pi) * base : base;
  }

  LandauParams landau_limit() const {
    return {0.0, kind_ == SumKind::HalfCauchySum ? 1.0 : pi / 2.0};
  }

  double pdf(double x) const {
    if (x <= support_min()) return 0.0;
    if (mode_ == EvalMode::Landau)
      return landau_pdf(x - hybrid_center(), landau_limit());
    return exact_pdf(x);
  }

  double cdf(double x) const {
    if (x <= support_min()) return 0.0;
    if (mode_ == EvalMode::Landau)
      return landau_cdf(x - hybrid_center(), landau_limit());
    return exact_cdf(x);
  }

  /// 1 - cdf(x), computed without cancellation in exact mode.
  double survival(double x) const {
    if (x <= support_min()) return 1.0;
    if (mode_ == EvalMode::Landau)
      return 1.0 - landau_cdf(x - hybrid_center(), landau_limit());
    const double s = cdf_tail_integral(x);
    return std::min(std::max(s, 0.0), 1.0);
  }

  double exact_pdf(double x) const {
    if (x <= support_min()) return 0.0;
    const auto tail = analyze_integrand(x);
    if (!tail.usable) return 0.0;
    auto f = [&](double z) { return pdf_integrand(z, x); };
    const double v = inversion_integral(f, tail.z_max);
    return std::max(v / pi, 0.0);
  }

  double exact_cdf(double x) const {
    if (x <= support_min()) return 0.0;
    return std::min(std::max(1.0 - cdf_tail_integral(x), 0.0), 1.0);
  }

  double quantile(double u) const {
    if (!(u > 0.0) || !(u < 1.0))
      throw domain_error("NullDistribution::quantile: u must lie in (0,1)");
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto it = quantile_memo_.find(u);
      if (it != quantile_memo_.end()) return it->second;
    }
    const double x = compute_quantile(u);
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      quantile_memo_.emplace(u, x);
    }
    return x;
  }

 private:
  std::complex<double> log_factor(double a) const {
    return kind_ == SumKind::HalfCauchySum ? log_factor_hc(a)
                                           : log_factor_pareto(a);
  }

  std::complex<double> log_sum(double z, double x) const {
    std::complex<double> s(-x * z, 0.0);
    if (equal_weighted_)
      s += static_cast<double>(weights_.size()) * log_factor(weights_[0] * z);
    else
      for (double w : weights_) s += log_factor(w * z);
    return s;
  }

  double log_sum_imag_exp(double z, double x) const {
    const std::complex<double> s = log_sum(z, x);
    // Guard: the real part is strongly negative in the tail; exp underflow
    // to zero is the correct limit.
    if (s.real() < -745.0) return 0.0;
    return std::exp(s.real()) * std::sin(s.imag());
  }

  double pdf_integrand(double z, double x) const {
    return log_sum_imag_exp(std::max(z, 1e-12), x);
  }

  double cdf_integrand(double z, double x) const {
    const double zz = std::max(z, 1e-8);  // finite z->0 limit
    return log_sum_imag_exp(zz, x) / zz;
  }

  struct TailAnalysis {
    bool usable = false;  // false: x sits far below the bulk, value ~ 0
    double z_max = 60.0;  // truncation point with log-amplitude < -35
  };

  // Scan Re{-xz + sum log factors}. The integral is representable only when
  // the peak log-amplitude is moderate (large peaks mean a doubly-
  // exponentially small left-tail value hiding in huge oscillations) and the
  // amplitude eventually decays; the scan picks the truncation point.
  TailAnalysis analyze_integrand(double x) const {
    const double decay = std::max(x - support_min(), 0.05);
    const double z_base = std::max(60.0, 60.0 / decay);
    const double z_cap = 2e4;
    double peak = -1e300;
    for (double z = 1e-10; z <= z_cap; z *= 1.25) {
      const double re = log_sum(z, x).real();
      peak = std::max(peak, re);
      if (peak > 25.0) return {false, z_base};
      if (z >= z_base && re < -35.0) return {true, z};
    }
    return {false, z_base};
  }

  template <typename F>
  double inversion_integral(F&& f, double z_max) const {
    const double eps = 1e-12;
    // Seed panels log-spaced below 1 (integrand scales with 1/x there) and
    // a few oscillation periods wide above, since the phase grows like z.
    std::vector<double> seeds;
    for (double s = 1e-10; s < 1.0; s *= 10.0) seeds.push_back(s);
    const int lin = std::min(
        8000, std::max(16, static_cast<int>((z_max - 1.0) / 3.0)));
    for (int i = 1; i < lin; ++i)
      seeds.push_back(1.0 + (z_max - 1.0) * i / lin);
    const auto r = quad::integrate(f, eps, z_max, 1e-10, 200000, seeds);
    return r.value;
  }

  // (1/pi) int_0^inf e^{-xz}/z * Im exp{...} dz  == 1 - F(x)
  double cdf_tail_integral(double x) const {
    const auto tail = analyze_integrand(x);
    if (!tail.usable) return 1.0;
    auto f = [&](double z) { return cdf_integrand(z, x); };
    return inversion_integral(f, tail.z_max) / pi;
  }

  double compute_quantile(double u) const {
    const double smin = support_min();
    // Tail-asymptotic initial guess from the Cauchy-like right tail.
    const double tail_scale =
        kind_ == SumKind::HalfCauchySum ? 2.0 / pi : 1.0;
    double hi = smin + std::max(tail_scale / (1.0 - u), 1.0);
    int guard = 0;
    while (cdf(hi) < u && ++guard < 200) hi = smin + (hi - smin) * 2.0;
    // Walk the lower bracket end down geometrically instead of starting at
    // the support edge, where the inversion integral is ill-conditioned.
    double lo = smin + (hi - smin) / 2.0;
    guard = 0;
    while (cdf(lo) > u && ++guard < 60) lo = smin + (lo - smin) / 2.0;
    if (guard >= 60) return lo;
    auto g = [&](double x) { return cdf(x) - u; };
    return brent_root(g, lo, hi, 1e-9);
  }

  SumKind kind_;
  std::vector<double> weights_;
  EvalMode mode_;
  bool equal_weighted_ = false;
  mutable std::map<double, double> quantile_memo_;
  mutable std::mutex memo_mutex_;
};

}  // namespace heavytail
