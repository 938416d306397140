#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace heavytail {

struct bracket_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScalarBracket {
  double a, b;
};

// ---------------------------------------------------------------------------
// Brent root finding (bisection + secant + inverse quadratic interpolation).
// ---------------------------------------------------------------------------

template <typename F>
double brent_root(F&& f, double a, double b, double tol = 1e-12) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw bracket_error("brent_root: endpoints do not bracket a sign change");

  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Brent minimization (golden section + parabolic interpolation).
// ---------------------------------------------------------------------------

struct MinResult {
  double x;
  double fx;
};

template <typename F>
MinResult brent_min(F&& f, double a, double b, double tol = 1e-8) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 300; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool parabolic = false;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm > x ? tol1 : -tol1);
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x >= xm ? a : b) - x;
      d = gold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

// ---------------------------------------------------------------------------
// Derivative-free multivariate minimization: Nelder-Mead simplex descent
// with one restart from the incumbent best point.
// ---------------------------------------------------------------------------

struct VecMinResult {
  std::vector<double> x;
  double fx = 0.0;
  bool converged = true;
};

namespace detail {

template <typename F>
VecMinResult nelder_mead(F&& f, std::vector<double> x0, double tol,
                         int max_iter, double initial_step) {
  const std::size_t n = x0.size();
  if (n == 0) return {x0, 0.0, true};

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fvals(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    simplex[i + 1][i] += initial_step * (std::abs(x0[i]) > 1.0
                                             ? std::abs(x0[i])
                                             : 1.0);
  for (std::size_t i = 0; i <= n; ++i) fvals[i] = f(simplex[i]);

  auto order = [&] {
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j)
        if (fvals[j] < fvals[i]) {
          std::swap(fvals[i], fvals[j]);
          std::swap(simplex[i], simplex[j]);
        }
  };

  int iter = 0;
  double diameter = 0.0;
  while (iter < max_iter) {
    order();
    diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t c = 0; c < n; ++c)
        diameter = std::max(diameter,
                            std::abs(simplex[i][c] - simplex[0][c]));
    if (diameter <= tol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n; ++c) centroid[c] += simplex[i][c] / n;

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t c = 0; c < n; ++c)
        p[c] = centroid[c] + coef * (simplex[n][c] - centroid[c]);
      return p;
    };

    const auto refl = blend(-1.0);
    const double frefl = f(refl);
    ++iter;
    if (frefl < fvals[0]) {
      const auto exp_pt = blend(-2.0);
      const double fexp = f(exp_pt);
      if (fexp < frefl) {
        simplex[n] = exp_pt;
        fvals[n] = fexp;
      } else {
        simplex[n] = refl;
        fvals[n] = frefl;
      }
    } else if (frefl < fvals[n - 1]) {
      simplex[n] = refl;
      fvals[n] = frefl;
    } else {
      const auto contr = blend(frefl < fvals[n] ? -0.5 : 0.5);
      const double fcontr = f(contr);
      if (fcontr < std::min(frefl, fvals[n])) {
        simplex[n] = contr;
        fvals[n] = fcontr;
      } else {
        // shrink toward best
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t c = 0; c < n; ++c)
            simplex[i][c] = simplex[0][c] + 0.5 * (simplex[i][c] - simplex[0][c]);
          fvals[i] = f(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], fvals[0], diameter <= 100.0 * tol};
}

}  // namespace detail

template <typename F>
VecMinResult minimize_df(F&& f, const std::vector<double>& x0,
                         double tol = 1e-6, int max_iter = 5000) {
  auto wrap = [&](const std::vector<double>& x) { return f(x); };
  auto first = detail::nelder_mead(wrap, x0, tol, max_iter, 0.5);
  // Restart once from the incumbent best with a smaller simplex.
  auto second = detail::nelder_mead(wrap, first.x, tol, max_iter, 0.05);
  return second.fx <= first.fx ? second : first;
}

// ---------------------------------------------------------------------------
// Penalty-method support function of a convex region {score <= threshold}:
// extreme of b'theta subject to the score constraint.
// ---------------------------------------------------------------------------

enum class Direction { Min, Max };

template <typename Score>
double penalty_extreme(Direction direction, const std::vector<double>& b,
                       Score&& score, double threshold, double lambda,
                       const std::vector<double>& x0) {
  const std::size_t n = b.size();
  if (score(x0) > threshold + 1e-9 * (std::abs(threshold) + 1.0))
    throw std::invalid_argument("penalty_extreme: infeasible start point");

  const double sign = direction == Direction::Max ? -1.0 : 1.0;
  auto objective = [&](const std::vector<double>& x) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += b[i] * x[i];
    const double violation = std::max(score(x) - threshold, 0.0);
    return sign * dot + lambda * violation;
  };

  // 1-D extent of the region along b gives boundary-adjacent starts.
  auto along = [&](double t) {
    std::vector<double> p(x0);
    for (std::size_t i = 0; i < n; ++i) p[i] += t * b[i];
    return score(p) - threshold;
  };
  const double dir_t = direction == Direction::Max ? 1.0 : -1.0;
  double t_hi = dir_t;
  int guard = 0;
  while (along(t_hi) < 0.0 && ++guard < 200) t_hi *= 2.0;
  double t_edge = 0.0;
  if (guard < 200) t_edge = brent_root(along, 0.0, t_hi, 1e-10);

  std::vector<std::vector<double>> starts;
  starts.push_back(x0);
  for (double frac : {0.95, 0.999}) {
    std::vector<double> p(x0);
    for (std::size_t i = 0; i < n; ++i) p[i] += frac * t_edge * b[i];
    starts.push_back(p);
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (const auto& s : starts) {
    auto r = minimize_df(objective, s, 1e-9, 8000);
    if (r.fx < best) {
      best = r.fx;
      best_x = r.x;
    }
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += b[i] * best_x[i];
  return dot;
}

}  // namespace heavytail
