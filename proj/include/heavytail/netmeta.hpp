// Network meta-analysis from contrast-level data: design matrix, WLS
// baseline with Bonferroni simultaneous CIs, and combination-test fits with
// simultaneous pairwise-comparison intervals.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "heavytail/confregion.hpp"

namespace heavytail {

struct Contrast {
  std::string study;
  std::string treat_a;
  std::string treat_b;
  double te = 0.0;  // effect estimate for treat_a minus treat_b
  double se = 1.0;
  double df = std::numeric_limits<double>::infinity();
};

struct ArmRow {
  std::string study;
  std::string treatment;
  double mean = 0.0;
  double sd = 1.0;
  int n = 0;
};

struct Design {
  Eigen::MatrixXd omega;                // m x d, reference column omitted
  std::vector<std::string> treatments;  // the d non-reference labels, sorted
  std::string reference;
};

inline std::vector<Contrast> expand_arms(const std::vector<ArmRow>& arms) {
  std::map<std::string, std::vector<const ArmRow*>> by_study;
  for (const auto& a : arms) {
    if (!(a.sd > 0.0) || a.n < 2)
      throw domain_error("expand_arms: need sd > 0 and n >= 2 per arm");
    by_study[a.study].push_back(&a);
  }
  std::vector<Contrast> out;
  for (auto& [study, rows] : by_study) {
    if (rows.size() < 2)
      throw domain_error("expand_arms: study '" + study +
                         "' has a single arm");
    std::sort(rows.begin(), rows.end(),
              [](const ArmRow* a, const ArmRow* b) {
                return a->treatment < b->treatment;
              });
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        const ArmRow &a = *rows[i], &b = *rows[j];
        Contrast c;
        c.study = study;
        c.treat_a = a.treatment;
        c.treat_b = b.treatment;
        c.te = a.mean - b.mean;
        c.se = std::sqrt(a.sd * a.sd / a.n + b.sd * b.sd / b.n);
        out.push_back(std::move(c));
      }
  }
  return out;
}

inline std::string default_reference(const std::vector<Contrast>& contrasts) {
  std::set<std::string> labels;
  for (const auto& c : contrasts) {
    labels.insert(c.treat_a);
    labels.insert(c.treat_b);
  }
  if (labels.count("placebo")) return "placebo";
  return *labels.begin();  // lexicographically smallest
}

inline Design build_design(const std::vector<Contrast>& contrasts,
                           const std::string& reference) {
  if (contrasts.empty()) throw domain_error("build_design: no contrasts");
  std::set<std::string> labels;
  for (const auto& c : contrasts) {
    if (c.treat_a == c.treat_b)
      throw domain_error("build_design: self-contrast in study " + c.study);
    if (!(c.se > 0.0))
      throw domain_error("build_design: se must be positive");
    labels.insert(c.treat_a);
    labels.insert(c.treat_b);
  }
  if (!labels.count(reference))
    throw domain_error("build_design: reference '" + reference +
                       "' not in network");

  // Connectivity: union-find over treatment labels.
  std::map<std::string, std::string> parent;
  for (const auto& l : labels) parent[l] = l;
  std::function<std::string(std::string)> find = [&](std::string x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : contrasts) parent[find(c.treat_a)] = find(c.treat_b);
  std::map<std::string, std::vector<std::string>> comps;
  for (const auto& l : labels) comps[find(l)].push_back(l);
  if (comps.size() > 1) {
    std::string msg = "build_design: network is disconnected; components:";
    for (const auto& [root, members] : comps) {
      msg += " {";
      for (std::size_t i = 0; i < members.size(); ++i)
        msg += (i ? "," : "") + members[i];
      msg += "}";
    }
    throw domain_error(msg);
  }

  Design dsg;
  dsg.reference = reference;
  for (const auto& l : labels)
    if (l != reference) dsg.treatments.push_back(l);
  std::map<std::string, int> col;
  for (std::size_t i = 0; i < dsg.treatments.size(); ++i)
    col[dsg.treatments[i]] = static_cast<int>(i);
  const int d = static_cast<int>(dsg.treatments.size());
  dsg.omega = Eigen::MatrixXd::Zero(static_cast<int>(contrasts.size()), d);
  for (std::size_t j = 0; j < contrasts.size(); ++j) {
    if (contrasts[j].treat_a != reference)
      dsg.omega(static_cast<int>(j), col[contrasts[j].treat_a]) += 1.0;
    if (contrasts[j].treat_b != reference)
      dsg.omega(static_cast<int>(j), col[contrasts[j].treat_b]) -= 1.0;
  }
  return dsg;
}

enum class NetMethod { WLS, HCCT, EHMP };

struct NetworkFit {
  Design design;
  NetMethod method = NetMethod::WLS;
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd L;            // WLS covariance (Omega' W Omega)^{-1}
  RegionHandle region;          // combination-test fits
  std::vector<std::size_t> dropped;  // adaptive drops (contrast indices)
  int d() const { return static_cast<int>(design.treatments.size()); }
};

inline NetworkFit wls_fit(const std::vector<Contrast>& contrasts,
                          const std::string& reference) {
  NetworkFit fit;
  fit.design = build_design(contrasts, reference);
  fit.method = NetMethod::WLS;
  const int m = static_cast<int>(contrasts.size());
  Eigen::VectorXd zeta(m), wdiag(m);
  for (int j = 0; j < m; ++j) {
    zeta(j) = contrasts[j].te;
    wdiag(j) = 1.0 / (contrasts[j].se * contrasts[j].se);
  }
  const Eigen::MatrixXd& omega = fit.design.omega;
  const Eigen::MatrixXd A = omega.transpose() * wdiag.asDiagonal() * omega;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw domain_error("wls_fit: design is rank deficient");
  fit.theta_hat = llt.solve(omega.transpose() * (wdiag.asDiagonal() * zeta));
  fit.L = llt.solve(Eigen::MatrixXd::Identity(fit.d(), fit.d()));
  return fit;
}

// Bonferroni-adjusted normal intervals for b' theta over K comparisons.
inline std::vector<IntervalResult> wls_simultaneous(
    const NetworkFit& fit, double level,
    const std::vector<Eigen::VectorXd>& comparisons) {
  if (fit.method != NetMethod::WLS)
    throw domain_error("wls_simultaneous: WLS fit required");
  if (comparisons.empty()) return {};
  const double alpha = 1.0 - level;
  const double z =
      detail::normal_quantile(1.0 - alpha / (2.0 * comparisons.size()));
  std::vector<IntervalResult> out;
  out.reserve(comparisons.size());
  for (const auto& b : comparisons) {
    if (b.size() != fit.d())
      throw domain_error("wls_simultaneous: bad comparison vector");
    const double center = b.dot(fit.theta_hat);
    const double half = z * std::sqrt(b.dot(fit.L * b));
    out.push_back(IntervalResult::interval(center - half, center + half));
  }
  return out;
}

inline std::vector<SubStudy> contrast_substudies(
    const std::vector<Contrast>& contrasts, const Design& dsg) {
  std::vector<SubStudy> subs;
  subs.reserve(contrasts.size());
  for (std::size_t j = 0; j < contrasts.size(); ++j) {
    SubStudy s;
    s.xi = Eigen::VectorXd::Constant(1, contrasts[j].te);
    s.sigma =
        Eigen::MatrixXd::Constant(1, 1, contrasts[j].se * contrasts[j].se);
    s.P = dsg.omega.row(static_cast<int>(j));
    s.df = contrasts[j].df;
    subs.push_back(std::move(s));
  }
  return subs;
}

inline NetworkFit hcct_fit(const std::vector<Contrast>& contrasts,
                           const std::string& reference, double level,
                           CombinerKind kind = CombinerKind::HCCT,
                           std::size_t exact_m_max = 1000) {
  if (kind != CombinerKind::HCCT && kind != CombinerKind::EHMP)
    throw domain_error("hcct_fit: combiner must be HCCT or EHMP");
  NetworkFit fit;
  fit.design = build_design(contrasts, reference);
  fit.method = kind == CombinerKind::HCCT ? NetMethod::HCCT : NetMethod::EHMP;
  auto subs = contrast_substudies(contrasts, fit.design);
  const std::vector<double> w(subs.size(), 1.0 / subs.size());
  try {
    auto res = adaptive_nonempty(subs, kind, w, level, exact_m_max);
    fit.region = std::move(res.region);
    fit.dropped = std::move(res.dropped);
  } catch (const domain_error& e) {
    std::string msg = e.what();
    const auto pos = msg.find("dropping study ");
    if (pos != std::string::npos) {
      // Translate the index into treatment names for diagnosis.
      const std::size_t j = std::stoul(msg.substr(pos + 15));
      msg += " (contrast " + contrasts[j].treat_a + " vs " +
             contrasts[j].treat_b + " in study " + contrasts[j].study + ")";
    }
    throw domain_error(msg);
  }
  fit.theta_hat = fit.region.point_estimate();
  return fit;
}

struct PairwiseCI {
  std::string treat_a;  // vs treat_b ("placebo"/reference when b empty)
  std::string treat_b;
  IntervalResult ci;
};

inline std::vector<PairwiseCI> all_pairwise_cis(const NetworkFit& fit,
                                                double /*level*/ = 0.95) {
  if (fit.method == NetMethod::WLS)
    throw domain_error("all_pairwise_cis: combination-test fit required");
  const int d = fit.d();
  std::vector<PairwiseCI> out;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    b(i) = 1.0;
    out.push_back({fit.design.treatments[i], fit.design.reference,
                   simultaneous_ci(fit.region, b)});
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      b(i) = 1.0;
      b(j) = -1.0;
      out.push_back({fit.design.treatments[i], fit.design.treatments[j],
                     simultaneous_ci(fit.region, b)});
    }
  return out;
}

}  // namespace heavytail
