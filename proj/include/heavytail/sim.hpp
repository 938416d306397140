// Seeded Monte-Carlo harness: counter-based Gaussian sampling under
// exchangeable / AR-1 dependence and the calibration, coverage, power, and
// divide-and-combine experiments.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "heavytail/combine.hpp"
#include "heavytail/confregion.hpp"
#include "heavytail/divide_combine.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

struct CorrSpec {
  enum class Kind { Identity, Equi, AR1 };
  Kind kind = Kind::Identity;
  double rho = 0.0;
  int m = 1;
};

struct SignalSpec {
  double r = 0.0;  // strength
  double s = 0.0;  // sparsity in [0,1)
  int m = 1;
  int m0() const {
    return std::max(1, static_cast<int>(std::floor(
                           std::pow(static_cast<double>(m), 1.0 - s))));
  }
  double mu() const { return std::sqrt(2.0 * r * std::log(m0())); }
};

namespace rng {

// Counter-based generator: every variate is a pure hash of
// (seed, replicate, index), so replicates are order-independent.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t rep,
                           std::uint64_t idx) {
  return mix64(seed ^ mix64(rep ^ mix64(idx)));
}

inline double uniform01(std::uint64_t seed, std::uint64_t rep,
                        std::uint64_t idx) {
  return (static_cast<double>(hash3(seed, rep, idx) >> 11) + 0.5) *
         0x1.0p-53;
}

inline double normal(std::uint64_t seed, std::uint64_t rep,
                     std::uint64_t idx) {
  const double u1 = uniform01(seed, rep, 2 * idx);
  const double u2 = uniform01(seed, rep, 2 * idx + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

}  // namespace rng

// One draw from N_m(mean, Sigma(spec)) for replicate `rep`.
inline Eigen::VectorXd mvn_row(const CorrSpec& spec,
                               const Eigen::VectorXd& mean, std::uint64_t seed,
                               std::uint64_t rep) {
  const int m = spec.m;
  if (mean.size() != m) throw domain_error("mvn_row: mean length mismatch");
  if (spec.kind != CorrSpec::Kind::Identity &&
      (!(spec.rho >= 0.0) || !(spec.rho < 1.0)))
    throw domain_error("mvn_row: need 0 <= rho < 1");
  Eigen::VectorXd x(m);
  switch (spec.kind) {
    case CorrSpec::Kind::Identity:
      for (int i = 0; i < m; ++i) x(i) = rng::normal(seed, rep, i);
      break;
    case CorrSpec::Kind::Equi: {
      // Rank-1 shortcut: sqrt(rho) Z0 + sqrt(1-rho) Z_i.
      const double z0 = rng::normal(seed, rep, m);
      const double a = std::sqrt(spec.rho), b = std::sqrt(1.0 - spec.rho);
      for (int i = 0; i < m; ++i)
        x(i) = a * z0 + b * rng::normal(seed, rep, i);
      break;
    }
    case CorrSpec::Kind::AR1: {
      double prev = rng::normal(seed, rep, 0);
      x(0) = prev;
      const double c = std::sqrt(1.0 - spec.rho * spec.rho);
      for (int i = 1; i < m; ++i) {
        prev = spec.rho * prev + c * rng::normal(seed, rep, i);
        x(i) = prev;
      }
      break;
    }
  }
  return x + mean;
}

inline Eigen::MatrixXd mvn_sample(int n, const CorrSpec& spec,
                                  const Eigen::VectorXd& mean,
                                  std::uint64_t seed) {
  Eigen::MatrixXd X(n, spec.m);
  for (int r = 0; r < n; ++r) X.row(r) = mvn_row(spec, mean, seed, r);
  return X;
}

namespace detail {

inline std::vector<double> two_sided_pvalues(const Eigen::VectorXd& x) {
  std::vector<double> p(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    p[i] = std::erfc(std::fabs(x(i)) / std::sqrt(2.0));
  return p;
}

}  // namespace detail

inline double experiment_fpr(CombinerKind kind, const CorrSpec& spec,
                             double alpha, int reps, std::uint64_t seed,
                             double signal_mu = 0.0, int signal_m0 = 0) {
  if (reps < 100) throw domain_error("experiment_fpr: need reps >= 100");
  const std::vector<double> w(spec.m, 1.0 / spec.m);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.m);
  for (int i = 0; i < std::min(signal_m0, spec.m); ++i) mean(i) = signal_mu;

  // Cache the exact null quantile for the heavy-tail combiners: rejecting
  // via statistic > quantile(1-alpha) is equivalent and far cheaper.
  double thr = 0.0;
  const bool additive =
      kind == CombinerKind::HCCT || kind == CombinerKind::EHMP;
  if (additive) {
    NullDistribution dist(detail::sum_kind_of(kind), Weights(w));
    thr = dist.quantile(1.0 - alpha);
  }
  int rejections = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto p = detail::two_sided_pvalues(mvn_row(spec, mean, seed, rep));
    const bool rej = additive ? statistic(kind, p, w) > thr
                              : global_pvalue(kind, p, w) <= alpha;
    rejections += rej;
  }
  return static_cast<double>(rejections) / reps;
}

inline double experiment_power(CombinerKind kind, const CorrSpec& spec,
                               const SignalSpec& signal, double alpha,
                               int reps, std::uint64_t seed) {
  if (signal.m != spec.m) throw domain_error("experiment_power: m mismatch");
  const double mu = signal.r > 0.0 ? signal.mu() : 0.0;
  return experiment_fpr(kind, spec, alpha, reps, seed, mu, signal.m0());
}

struct CoverageResult {
  double coverage = 0.0;
  double mean_width = 0.0;
  double empty_rate = 0.0;
};

inline CoverageResult experiment_coverage_1d(const CorrSpec& spec,
                                             double level, int reps,
                                             std::uint64_t seed,
                                             CombinerKind kind =
                                                 CombinerKind::HCCT) {
  const std::vector<double> w(spec.m, 1.0 / spec.m);
  const double thr = invert_threshold(kind, w, level);
  const Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.m);
  int covered = 0, empty = 0;
  double width_sum = 0.0;
  int width_n = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const Eigen::VectorXd x = mvn_row(spec, mean, seed, rep);
    std::vector<StudySummary1D> studies(spec.m);
    for (int i = 0; i < spec.m; ++i) studies[i] = {x(i), 1.0};
    const auto iv = invert_1d_at_threshold(studies, kind, w, thr);
    if (iv.empty) {
      ++empty;
      continue;
    }
    covered += iv.lo <= 0.0 && 0.0 <= iv.hi;
    width_sum += iv.hi - iv.lo;
    ++width_n;
  }
  CoverageResult res;
  res.coverage = static_cast<double>(covered) / reps;
  res.mean_width = width_n ? width_sum / width_n : 0.0;
  res.empty_rate = static_cast<double>(empty) / reps;
  return res;
}

enum class DacDist { Normal, LogNormal };

inline double experiment_dac(DacDist dist, int d, int n, int d0, double rho,
                             double level, int reps, std::uint64_t seed,
                             CombinerKind kind = CombinerKind::HCCT) {
  CorrSpec spec{rho > 0.0 ? CorrSpec::Kind::Equi : CorrSpec::Kind::Identity,
                rho, d};
  const auto plan = coordinate_blocks(d, d0);
  const std::vector<double> w(plan.m(), 1.0 / plan.m());
  const double thr = invert_threshold(kind, w, level);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  const double truth_val =
      dist == DacDist::Normal ? 0.0 : std::exp(0.5);  // E exp(N(0,1))
  const Eigen::VectorXd truth = Eigen::VectorXd::Constant(d, truth_val);

  int covered = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd X(n, d);
    for (int r = 0; r < n; ++r)
      X.row(r) = mvn_row(spec, zero, seed, static_cast<std::uint64_t>(rep) * n + r);
    if (dist == DacDist::LogNormal) X = X.array().exp().matrix();
    const auto subs = substudies_from_samples(X, plan);
    // Containment is score(truth) <= threshold; no minimization needed.
    covered += score_md(truth, subs, kind, w) <= thr;
  }
  return static_cast<double>(covered) / reps;
}

}  // namespace heavytail
