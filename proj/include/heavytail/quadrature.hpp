#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace heavytail {

/// Adaptive Gauss-Kronrod (7-15) quadrature on finite intervals.
///
/// Panels whose Kronrod/Gauss discrepancy exceeds the tolerance are
/// bisected; the per-panel error estimates are summed into `err_out`.
namespace quad {

namespace detail {

// Nodes/weights for the 15-point Kronrod rule with embedded 7-point Gauss.
inline constexpr std::array<double, 8> gk15_nodes = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01};

inline constexpr std::array<double, 8> gk15_wk = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02};

inline constexpr std::array<double, 4> gk15_wg = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01};

struct PanelResult {
  double integral;
  double error;
};

template <typename F>
PanelResult gk15(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);

  const double fc = f(c);
  double res_k = gk15_wk[0] * fc;
  double res_g = gk15_wg[0] * fc;

  for (std::size_t i = 1; i < 8; ++i) {
    const double dx = h * gk15_nodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    res_k += gk15_wk[i] * fsum;
    if (i % 2 == 0) res_g += gk15_wg[i / 2] * fsum;
  }
  res_k *= h;
  res_g *= h;

  const double diff = std::abs(res_k - res_g);
  // QUADPACK-style sharpened estimate: (200*diff)^1.5 capped by diff.
  const double err =
      diff > 0.0 ? std::min(diff, std::pow(200.0 * diff, 1.5)) : 0.0;
  return {res_k, std::max(err, 1e-18 * std::abs(res_k))};
}

}  // namespace detail

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Integrate f over [a, b] to absolute tolerance `abs_tol`.
/// `seeds` optionally supplies interior breakpoints for the initial
/// subdivision (useful when the integrand lives on widely varying scales).
template <typename F>
Result integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 std::size_t max_panels = 200000,
                 const std::vector<double>& seeds = {}) {
  if (!(a < b)) return {0.0, 0.0, true};

  struct Panel {
    double a, b, integral, error;
  };

  std::vector<Panel> stack;
  std::vector<double> pts;
  pts.push_back(a);
  for (double s : seeds)
    if (s > a && s < b) pts.push_back(s);
  pts.push_back(b);

  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto r = detail::gk15(f, pts[i], pts[i + 1]);
    stack.push_back({pts[i], pts[i + 1], r.integral, r.error});
    total += r.integral;
    total_err += r.error;
  }

  std::size_t panels = stack.size();
  while (total_err > abs_tol && panels < max_panels) {
    // Bisect the panel with the largest error estimate.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < stack.size(); ++i)
      if (stack[i].error > stack[worst].error) worst = i;
    Panel p = stack[worst];
    if (p.b - p.a < 1e-15 * (std::abs(p.a) + std::abs(p.b) + 1.0)) break;

    const double mid = 0.5 * (p.a + p.b);
    auto left = detail::gk15(f, p.a, mid);
    auto right = detail::gk15(f, mid, p.b);

    total += left.integral + right.integral - p.integral;
    total_err += left.error + right.error - p.error;

    stack[worst] = {p.a, mid, left.integral, left.error};
    stack.push_back({mid, p.b, right.integral, right.error});
    ++panels;
  }

  return {total, total_err, total_err <= abs_tol * 1.001 + 1e-300};
}

}  // namespace quad

}  // namespace heavytail
