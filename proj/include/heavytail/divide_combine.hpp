// Divide-and-combine mean estimation: split coordinates into blocks, run a
// one-sample Hotelling sub-study per block, and invert the combined test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "heavytail/confregion.hpp"

namespace heavytail {

struct BlockPlan {
  int d = 0;
  int d0 = 0;
  std::vector<std::pair<int, int>> blocks;  // [start, size) per block
  std::size_t m() const { return blocks.size(); }
};

inline BlockPlan coordinate_blocks(int d, int d0) {
  if (d < 1 || d0 < 1 || d0 > d)
    throw domain_error("coordinate_blocks: need 1 <= d0 <= d");
  BlockPlan plan{d, d0, {}};
  for (int at = 0; at < d; at += d0)
    plan.blocks.emplace_back(at, std::min(d0, d - at));
  return plan;
}

inline std::vector<SubStudy> substudies_from_samples(
    const Eigen::MatrixXd& X, const BlockPlan& plan) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  if (d != plan.d) throw domain_error("substudies_from_samples: plan/data d");
  if (n < 3) throw domain_error("substudies_from_samples: need n >= 3");
  if (!X.allFinite())
    throw domain_error("substudies_from_samples: non-finite entries");

  for (const auto& [start, size] : plan.blocks)
    if (n < size + 2)
      throw domain_error(
          "substudies_from_samples: need n >= block size + 2 (convexity)");

  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean;
  std::vector<SubStudy> subs;
  subs.reserve(plan.m());
  for (const auto& [start, size] : plan.blocks) {
    const Eigen::MatrixXd B = centered.middleCols(start, size);
    // Unbiased sample covariance of the block, scaled to the mean's
    // covariance so the quadratic form is the classical Hotelling T^2.
    const Eigen::MatrixXd S = (B.transpose() * B) / (n - 1.0);
    SubStudy s;
    s.xi = mean.segment(start, size).transpose();
    s.sigma = S / n;
    s.P = Eigen::MatrixXd::Zero(size, d);
    for (int i = 0; i < size; ++i) s.P(i, start + i) = 1.0;
    s.df = n - 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(s.sigma);
    if (llt.info() != Eigen::Success)
      throw domain_error("substudies_from_samples: singular covariance in "
                         "block starting at column " + std::to_string(start));
    subs.push_back(std::move(s));
  }
  return subs;
}

inline RegionHandle dac_region(const Eigen::MatrixXd& X, int d0,
                               CombinerKind kind, double level,
                               std::vector<double> weights = {},
                               std::size_t exact_m_max = 1000) {
  const auto plan = coordinate_blocks(static_cast<int>(X.cols()), d0);
  auto subs = substudies_from_samples(X, plan);
  if (weights.empty())
    weights.assign(subs.size(), 1.0 / static_cast<double>(subs.size()));
  return build_region(std::move(subs), kind, std::move(weights), level,
                      exact_m_max);
}

}  // namespace heavytail
