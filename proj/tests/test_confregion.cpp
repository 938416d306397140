// Tests for score construction, interval/region inversion, slices,
// simultaneous confidence intervals, the lower-bound statistic, and the
// adaptive empty-set procedure.

#include <catch2/catch_amalgamated.hpp>

#include <heavytail/confregion.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace ht = heavytail;
using Catch::Approx;

namespace {

std::vector<double> equal_w(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

// Two equally weighted normal studies at +-0.125 with sigma = 0.1.
std::vector<ht::StudySummary1D> mirror_fixture() {
  return {{0.125, 0.1}, {-0.125, 0.1}};
}

ht::SubStudy identity_substudy(const Eigen::VectorXd& xi, double s2,
                               double df = std::numeric_limits<double>::infinity()) {
  ht::SubStudy sub;
  sub.xi = xi;
  sub.sigma = s2 * Eigen::MatrixXd::Identity(xi.size(), xi.size());
  sub.P = Eigen::MatrixXd::Identity(xi.size(), xi.size());
  sub.df = df;
  return sub;
}

// Straight-line reimplementation of the multivariate score with explicit
// matrix inversion and no shared code with the library version.
double score_md_oracle(const Eigen::VectorXd& theta,
                       const std::vector<ht::SubStudy>& subs,
                       ht::CombinerKind kind, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t j = 0; j < subs.size(); ++j) {
    const auto& s = subs[j];
    const Eigen::VectorXd r = s.xi - s.P * theta;
    const double q = r.dot(s.sigma.inverse() * r);
    double cdf;
    const int dj = static_cast<int>(s.xi.size());
    if (std::isinf(s.df)) {
      cdf = ht::dist_cdf(ht::DistKind::chi2(dj), q);
    } else {
      cdf = ht::dist_cdf(
          ht::DistKind::hotelling_t2(dj, static_cast<int>(s.df)), q);
    }
    double p = 1.0 - cdf;
    p = std::max(p, 1e-300);
    const double term = kind == ht::CombinerKind::HCCT
                            ? 1.0 / std::tan(ht::pi * p / 2.0)
                            : 1.0 / p;
    total += w[j] * term;
  }
  return total;
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::fabs(a);
}

bool polygon_convex(const std::vector<Eigen::Vector2d>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = poly[(i + 1) % n] - poly[i];
    const Eigen::Vector2d b = poly[(i + 2) % n] - poly[(i + 1) % n];
    const double cross = a.x() * b.y() - a.y() * b.x();
    if (cross < -1e-9 * (a.norm() * b.norm() + 1e-300)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("score_1d closed-form checkpoints") {
  // Single study at its own estimate: p = 1, the score term is the support
  // minimum of the kernel (0 for half-Cauchy, 1 for Pareto).
  const std::vector<ht::StudySummary1D> one{{2.0, 0.5}};
  CHECK(ht::score_1d(2.0, one, ht::CombinerKind::HCCT, {1.0}) ==
        Approx(0.0).margin(1e-9));
  CHECK(ht::score_1d(2.0, one, ht::CombinerKind::EHMP, {1.0}) ==
        Approx(1.0).margin(1e-9));
  // At the classical 95% endpoint, p = 0.05 exactly, so the half-Cauchy
  // score equals the 0.95 quantile of the half-Cauchy kernel.
  const double z975 = 1.959963984540054;
  CHECK(ht::score_1d(2.0 + z975 * 0.5, one, ht::CombinerKind::HCCT, {1.0}) ==
        Approx(ht::dist_quantile(ht::DistKind::half_cauchy(), 0.95))
            .epsilon(1e-8));
  // Lower-bound inequality at theta = 0 on the mirrored fixture.
  CHECK(ht::score_1d(0.0, mirror_fixture(), ht::CombinerKind::HCCT,
                     equal_w(2)) >= 1.25);
}

TEST_CASE("single-study inversion reduces to the classical interval") {
  const std::vector<ht::StudySummary1D> one{{1.7, 0.3}};
  auto r = ht::invert_1d(one, ht::CombinerKind::HCCT, {1.0}, 0.95);
  REQUIRE_FALSE(r.empty);
  const double half = 1.959963984540054 * 0.3;
  CHECK(r.lo == Approx(1.7 - half).margin(1e-6));
  CHECK(r.hi == Approx(1.7 + half).margin(1e-6));
}

TEST_CASE("mirrored fixture inverts to one symmetric interval") {
  auto studies = mirror_fixture();
  auto r = ht::invert_1d(studies, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  REQUIRE_FALSE(r.empty);
  CHECK(r.lo == Approx(-r.hi).margin(1e-7));
  CHECK(r.hi > 0.0);  // the pooled value 0 is interior

  // Dense grid-scan oracle: the sub-threshold set is a single run and its
  // ends agree with the root-finder.
  const double thr =
      ht::invert_threshold(ht::CombinerKind::HCCT, equal_w(2), 0.95);
  const double span = 0.5;
  const int n = 100000;
  double grid_lo = 1e300, grid_hi = -1e300;
  int runs = 0;
  bool inside = false;
  for (int i = 0; i <= n; ++i) {
    const double t = -span + 2.0 * span * i / n;
    const bool in = ht::score_1d(t, studies, ht::CombinerKind::HCCT,
                                 equal_w(2)) <= thr;
    if (in && !inside) ++runs;
    inside = in;
    if (in) {
      grid_lo = std::min(grid_lo, t);
      grid_hi = std::max(grid_hi, t);
    }
  }
  CHECK(runs == 1);
  CHECK(r.lo == Approx(grid_lo).margin(2e-5));
  CHECK(r.hi == Approx(grid_hi).margin(2e-5));
}

TEST_CASE("irreconcilable studies produce an empty interval") {
  const std::vector<ht::StudySummary1D> far{{5.0, 0.01}, {-5.0, 0.01}};
  auto r = ht::invert_1d(far, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  CHECK(r.empty);
  // The lower bound alone certifies emptiness: 500 >> threshold ~ 13.69.
  CHECK(ht::lower_bound_stat(far, equal_w(2)) == Approx(500.0).margin(1e-9));
}

TEST_CASE("CCT grid inversion reproduces the disconnected example") {
  auto comps = ht::cct_invert_grid(mirror_fixture(), equal_w(2), 0.95, -0.2,
                                   0.2, 400000);
  REQUIRE(comps.size() == 3);
  const double want[3][2] = {
      {-0.1277, -0.1212}, {-0.1038, 0.1038}, {0.1212, 0.1277}};
  for (int i = 0; i < 3; ++i) {
    CHECK(comps[i].first == Approx(want[i][0]).margin(5e-4));
    CHECK(comps[i].second == Approx(want[i][1]).margin(5e-4));
  }
  // Every estimate lies in some component.
  for (double est : {0.125, -0.125}) {
    bool covered = false;
    for (const auto& c : comps)
      covered = covered || (est >= c.first && est <= c.second);
    CHECK(covered);
  }
  // Single study: one component matching the classical interval.
  auto single = ht::cct_invert_grid({{0.4, 0.2}}, {1.0}, 0.95, -1.0, 2.0,
                                    200000);
  REQUIRE(single.size() == 1);
  CHECK(single[0].first == Approx(0.4 - 1.959964 * 0.2).margin(1e-4));
  CHECK(single[0].second == Approx(0.4 + 1.959964 * 0.2).margin(1e-4));
}

TEST_CASE("score_md agrees with a straight-line oracle") {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nrm(0.0, 1.0);
  std::vector<ht::SubStudy> subs;
  for (int j = 0; j < 3; ++j) {
    ht::SubStudy s;
    s.xi = Eigen::VectorXd::NullaryExpr(2, [&](auto) { return nrm(gen); });
    Eigen::MatrixXd a =
        Eigen::MatrixXd::NullaryExpr(2, 2, [&](auto, auto) { return nrm(gen); });
    s.sigma = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(2, 2);
    s.P = Eigen::MatrixXd::Identity(2, 2);
    s.df = j == 0 ? std::numeric_limits<double>::infinity() : 12.0;
    subs.push_back(s);
  }
  const auto w = equal_w(3);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd theta =
        Eigen::VectorXd::NullaryExpr(2, [&](auto) { return nrm(gen); });
    for (auto kind : {ht::CombinerKind::HCCT, ht::CombinerKind::EHMP}) {
      const double got = ht::score_md(theta, subs, kind, w);
      const double want = score_md_oracle(theta, subs, kind, w);
      CHECK(got == Approx(want).margin(1e-9 * (1.0 + std::fabs(want))));
    }
  }
}

TEST_CASE("one-dimensional sub-studies reduce score_md to score_1d") {
  const std::vector<ht::StudySummary1D> studies{
      {0.3, 0.2, 11.0}, {-0.1, 0.5}, {0.7, 0.15, 7.0}};
  std::vector<ht::SubStudy> subs;
  for (const auto& s : studies) subs.push_back(ht::substudy_from_1d(s));
  const auto w = equal_w(3);
  for (double t : {-0.4, 0.0, 0.33, 1.2}) {
    Eigen::VectorXd theta(1);
    theta << t;
    for (auto kind : {ht::CombinerKind::HCCT, ht::CombinerKind::EHMP}) {
      CHECK(ht::score_md(theta, subs, kind, w) ==
            Approx(ht::score_1d(t, studies, kind, w)).margin(1e-10));
    }
  }
}

TEST_CASE("score_md is convex along random lines") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nrm(0.0, 1.0);
  std::vector<ht::SubStudy> subs;
  for (int j = 0; j < 4; ++j) {
    ht::SubStudy s;
    s.xi = Eigen::VectorXd::NullaryExpr(3, [&](auto) { return nrm(gen); });
    Eigen::MatrixXd a =
        Eigen::MatrixXd::NullaryExpr(3, 3, [&](auto, auto) { return nrm(gen); });
    s.sigma = a * a.transpose() + Eigen::MatrixXd::Identity(3, 3);
    s.P = Eigen::MatrixXd::Identity(3, 3);
    s.df = 9.0;  // df >= d_j + 1 guarantees convexity
    subs.push_back(s);
  }
  const auto w = equal_w(4);
  for (int line = 0; line < 20; ++line) {
    Eigen::VectorXd base =
        Eigen::VectorXd::NullaryExpr(3, [&](auto) { return nrm(gen); });
    Eigen::VectorXd dir =
        Eigen::VectorXd::NullaryExpr(3, [&](auto) { return nrm(gen); });
    dir.normalize();
    std::vector<double> vals;
    const double h = 0.08;
    for (int i = -10; i <= 10; ++i)
      vals.push_back(ht::score_md(base + (i * h) * dir, subs,
                                  ht::CombinerKind::HCCT, w));
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
      const double second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
      const double scale = std::fabs(vals[i]) + 1.0;
      CHECK(second >= -1e-7 * scale);
    }
  }
}

TEST_CASE("single identity sub-study gives the classical ellipsoid") {
  Eigen::VectorXd xi(2);
  xi << 0.4, -0.2;
  auto sub = identity_substudy(xi, 0.05);  // known covariance (df = inf)
  auto r = ht::build_region({sub}, ht::CombinerKind::HCCT, {1.0}, 0.95);
  REQUIRE(r.nonempty());
  CHECK(r.bounded);
  CHECK((r.point_estimate() - xi).norm() < 1e-5);
  CHECK(ht::contains(r, xi));
  Eigen::VectorXd far(2);
  far << 1e6, 1e6;
  CHECK_FALSE(ht::contains(r, far));
  // Boundary radius = sqrt(s2 * chi2_2 quantile(0.95)) in every direction.
  const double want_rad =
      std::sqrt(0.05 * ht::dist_quantile(ht::DistKind::chi2(2), 0.95));
  auto poly = ht::contour_2d(r, 64);
  for (const auto& v : poly)
    CHECK((v - Eigen::Vector2d(xi)).norm() == Approx(want_rad).epsilon(1e-5));
  // Simultaneous CI along b matches the ellipsoid support function.
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  auto ci = ht::simultaneous_ci(r, b);
  REQUIRE_FALSE(ci.empty);
  const double center = b.dot(xi);
  const double half = want_rad * b.norm();
  CHECK(ci.lo == Approx(center - half).margin(2e-4));
  CHECK(ci.hi == Approx(center + half).margin(2e-4));
}

TEST_CASE("contour polygons are convex and their area converges") {
  // Asymmetric three-study fixture in the plane.
  Eigen::VectorXd x1(2), x2(2), x3(2);
  x1 << -0.10, -0.10;
  x2 << 0.21, 0.0;
  x3 << 0.0, 0.21;
  std::vector<ht::SubStudy> subs{identity_substudy(x1, 0.01),
                                 identity_substudy(x2, 0.01),
                                 identity_substudy(x3, 0.01)};
  auto r = ht::build_region(subs, ht::CombinerKind::HCCT, equal_w(3), 0.95);
  REQUIRE(r.nonempty());
  auto p128 = ht::contour_2d(r, 128);
  auto p256 = ht::contour_2d(r, 256);
  CHECK(polygon_convex(p128));
  CHECK(polygon_convex(p256));
  CHECK(polygon_area(p256) ==
        Approx(polygon_area(p128)).epsilon(0.005));
  // Boundary points sit on the level set.
  for (int i = 0; i < 8; ++i) {
    Eigen::VectorXd v(2);
    v << p256[i * 32].x(), p256[i * 32].y();
    CHECK(r.score(v) == Approx(r.threshold).margin(1e-6 * r.threshold));
  }
}

TEST_CASE("regions are nested across confidence levels") {
  Eigen::VectorXd x1(2), x2(2);
  x1 << 0.0, 0.0;
  x2 << 0.3, 0.1;
  std::vector<ht::SubStudy> subs{identity_substudy(x1, 0.02),
                                 identity_substudy(x2, 0.02)};
  auto r95 = ht::build_region(subs, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  auto r99 = ht::build_region(subs, ht::CombinerKind::HCCT, equal_w(2), 0.99);
  REQUIRE(r95.nonempty());
  REQUIRE(r99.nonempty());
  auto poly = ht::contour_2d(r95, 64);
  for (const auto& v : poly) {
    Eigen::VectorXd p(2);
    p << v.x(), v.y();
    CHECK(ht::contains(r99, p));  // 95% boundary is interior to the 99% set
  }
}

TEST_CASE("intervals are equivariant under rescaling the data") {
  const std::vector<ht::StudySummary1D> studies{
      {0.2, 0.11}, {0.05, 0.2}, {0.4, 0.09}};
  auto base = ht::invert_1d(studies, ht::CombinerKind::EHMP, equal_w(3),
                            0.95);
  const double c = 3.7;
  std::vector<ht::StudySummary1D> scaled;
  for (auto s : studies) {
    s.theta_hat *= c;
    s.sigma_hat *= c;
    scaled.push_back(s);
  }
  auto big = ht::invert_1d(scaled, ht::CombinerKind::EHMP, equal_w(3), 0.95);
  REQUIRE_FALSE(base.empty);
  REQUIRE_FALSE(big.empty);
  CHECK(big.lo == Approx(c * base.lo).margin(1e-6));
  CHECK(big.hi == Approx(c * base.hi).margin(1e-6));
}

TEST_CASE("empty multivariate region for far-apart sub-studies") {
  Eigen::VectorXd a(2), b(2);
  a << 50.0, 0.0;
  b << -50.0, 0.0;
  std::vector<ht::SubStudy> subs{identity_substudy(a, 1e-4),
                                 identity_substudy(b, 1e-4)};
  auto r = ht::build_region(subs, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  CHECK_FALSE(r.nonempty());
  CHECK_THROWS_AS(r.point_estimate(), ht::domain_error);
  CHECK(ht::simultaneous_ci(r, Eigen::VectorXd::Ones(2)).empty);
}

TEST_CASE("partial projections leave the region unbounded") {
  // Two 1-D projections of a 2-D parameter that only observe the first
  // coordinate: the stacked projections do not span the plane.
  ht::SubStudy s;
  s.xi = Eigen::VectorXd::Constant(1, 0.2);
  s.sigma = Eigen::MatrixXd::Constant(1, 1, 0.01);
  s.P = Eigen::MatrixXd::Zero(1, 2);
  s.P(0, 0) = 1.0;
  auto s2 = s;
  s2.xi(0) = 0.25;
  auto r = ht::build_region({s, s2}, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  CHECK_FALSE(r.bounded);
  CHECK_THROWS_AS(ht::contour_2d(r), ht::domain_error);
  CHECK_THROWS_AS(ht::simultaneous_ci(r, Eigen::VectorXd::Ones(2)),
                  ht::domain_error);
}

TEST_CASE("slices are consistent with the full region") {
  // Spherical 3-D region from one identity sub-study.
  Eigen::VectorXd xi(3);
  xi << 0.1, -0.2, 0.3;
  auto r = ht::build_region({identity_substudy(xi, 0.04)},
                            ht::CombinerKind::HCCT, {1.0}, 0.95);
  REQUIRE(r.nonempty());
  const double rad =
      std::sqrt(0.04 * ht::dist_quantile(ht::DistKind::chi2(3), 0.95));
  // 1-D slice through the center along coordinate 0.
  auto iv = ht::slice_interval(r, {{1, xi(1)}, {2, xi(2)}}, 0);
  REQUIRE_FALSE(iv.empty);
  CHECK(iv.lo == Approx(xi(0) - rad).margin(1e-4));
  CHECK(iv.hi == Approx(xi(0) + rad).margin(1e-4));
  // 2-D slice through the center: circle of the same radius.
  auto circle = ht::slice_contour(r, {{2, xi(2)}}, 0, 1, 64);
  REQUIRE_FALSE(circle.empty());
  for (const auto& v : circle)
    CHECK((v - Eigen::Vector2d(xi(0), xi(1))).norm() ==
          Approx(rad).epsilon(1e-4));
  // Off-center slice: smaller circle with radius sqrt(rad^2 - off^2).
  const double off = 0.5 * rad;
  auto small = ht::slice_contour(r, {{2, xi(2) + off}}, 0, 1, 32);
  REQUIRE_FALSE(small.empty());
  const double want = std::sqrt(rad * rad - off * off);
  for (const auto& v : small)
    CHECK((v - Eigen::Vector2d(xi(0), xi(1))).norm() ==
          Approx(want).epsilon(1e-3));
  // Slice fully outside the ball is empty.
  auto outside = ht::slice_interval(r, {{1, xi(1) + 10 * rad}, {2, xi(2)}}, 0);
  CHECK(outside.empty);
}

TEST_CASE("simultaneous CI is positively homogeneous and matches invert_1d") {
  Eigen::VectorXd x1(2), x2(2);
  x1 << 0.1, 0.0;
  x2 << 0.0, 0.2;
  std::vector<ht::SubStudy> subs{identity_substudy(x1, 0.02),
                                 identity_substudy(x2, 0.03)};
  auto r = ht::build_region(subs, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  REQUIRE(r.nonempty());
  Eigen::VectorXd b(2);
  b << 0.7, -0.4;
  auto ci1 = ht::simultaneous_ci(r, b);
  auto ci2 = ht::simultaneous_ci(r, Eigen::VectorXd(2 * b));
  REQUIRE_FALSE(ci1.empty);
  CHECK(ci2.lo == Approx(2 * ci1.lo).margin(1e-4));
  CHECK(ci2.hi == Approx(2 * ci1.hi).margin(1e-4));

  // 1-D region: projection along b = (1) reproduces invert_1d.
  const std::vector<ht::StudySummary1D> studies{{0.2, 0.1}, {-0.1, 0.15}};
  std::vector<ht::SubStudy> oned;
  for (const auto& s : studies) oned.push_back(ht::substudy_from_1d(s));
  auto r1 = ht::build_region(oned, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  REQUIRE(r1.nonempty());
  auto proj = ht::simultaneous_ci(r1, Eigen::VectorXd::Ones(1));
  auto iv = ht::invert_1d(studies, ht::CombinerKind::HCCT, equal_w(2), 0.95);
  REQUIRE_FALSE(iv.empty);
  CHECK(proj.lo == Approx(iv.lo).margin(1e-4));
  CHECK(proj.hi == Approx(iv.hi).margin(1e-4));
}

TEST_CASE("lower bound statistic: arithmetic and validity") {
  // All estimates equal: zero.
  const std::vector<ht::StudySummary1D> same{{1.0, 0.5}, {1.0, 0.2}};
  CHECK(ht::lower_bound_stat(same, equal_w(2)) == Approx(0.0).margin(1e-12));
  // Mirrored fixture: 0.5*1.25 + 0.5*1.25 = 1.25 regardless of the median
  // tie rule.
  CHECK(ht::lower_bound_stat(mirror_fixture(), equal_w(2)) ==
        Approx(1.25).margin(1e-12));
  // Validity: never exceeds the minimized half-Cauchy score.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 2 + static_cast<std::size_t>(unif(gen) * 4);
    std::vector<ht::StudySummary1D> studies;
    std::vector<double> w;
    for (std::size_t j = 0; j < m; ++j) {
      studies.push_back({4.0 * unif(gen) - 2.0, 0.05 + unif(gen)});
      w.push_back(0.1 + unif(gen));
    }
    double sw = 0.0;
    for (double v : w) sw += v;
    for (double& v : w) v /= sw;
    double lo = 1e300, hi = -1e300;
    for (const auto& s : studies) {
      lo = std::min(lo, s.theta_hat);
      hi = std::max(hi, s.theta_hat);
    }
    auto h = [&](double t) {
      return ht::score_1d(t, studies, ht::CombinerKind::HCCT, w);
    };
    const double min_score =
        lo < hi ? ht::brent_min(h, lo, hi, 1e-10).fx : h(lo);
    CHECK(ht::lower_bound_stat(studies, w) <= min_score + 1e-9);
  }
}

TEST_CASE("heterogeneity scores flag the planted outlier") {
  const std::vector<ht::StudySummary1D> studies{
      {0.0, 0.1}, {0.05, 0.1}, {-0.02, 0.1}, {1.0, 0.1}};  // study 3 is 10 sigma off
  auto q = ht::heterogeneity_scores(studies, 0.01);
  REQUIRE(q.size() == 4);
  CHECK(q[0] == Approx(std::pow((0.0 - 0.01) / 0.1, 2)).margin(1e-12));
  std::size_t argmax = 0;
  for (std::size_t j = 1; j < q.size(); ++j)
    if (q[j] > q[argmax]) argmax = j;
  CHECK(argmax == 3);
  // Perfect fit: all zero.
  auto zero = ht::heterogeneity_scores(
      std::vector<ht::StudySummary1D>{{0.3, 0.2}, {0.3, 0.1}}, 0.3);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("adaptive procedure drops exactly the planted outlier") {
  std::vector<ht::StudySummary1D> studies{
      {0.00, 0.1}, {0.03, 0.1}, {-0.04, 0.1}, {0.02, 0.1}, {5.0, 0.1}};
  auto res = ht::adaptive_nonempty(studies, ht::CombinerKind::HCCT,
                                   equal_w(5), 0.95);
  REQUIRE(res.region.nonempty());
  REQUIRE(res.dropped.size() == 1);
  CHECK(res.dropped[0] == 4);
  // Consistent studies: no drops, same region as build_region.
  studies.pop_back();
  auto clean = ht::adaptive_nonempty(studies, ht::CombinerKind::HCCT,
                                     equal_w(4), 0.95);
  CHECK(clean.dropped.empty());
  REQUIRE(clean.region.nonempty());
}
