#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "heavytail/quadrature.hpp"

namespace heavytail {

inline constexpr double euler_gamma = 0.57721566490153286;
inline constexpr double pi = 3.14159265358979323846;

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Sine/cosine tail integrals
//
//   si(z) = -int_z^inf sin(t)/t dt = Si(z) - pi/2
//   ci(z) =  int_z^inf cos(t)/t dt = -Ci(z)
//
// Branches: power series (z < 4), continued fraction for E1(iz)
// (4 <= z < 40), asymptotic auxiliary series (z >= 40).
// ---------------------------------------------------------------------------

struct SiCi {
  double si;
  double ci;
};

namespace detail {

inline SiCi si_ci_series(double z) {
  // Si by odd series, Cin by even series; Ci = gamma + log z - Cin.
  const double z2 = z * z;
  double term = z, si_sum = z;
  for (int k = 1; k < 60; ++k) {
    // term_k = (-1)^k z^{2k+1} / (2k+1)!; series weight 1/(2k+1).
    term *= -z2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double add = term / (2.0 * k + 1.0);
    si_sum += add;
    if (std::abs(add) < 1e-18 * std::abs(si_sum) + 1e-300) break;
  }
  // Cin(z) = sum_{k>=1} (-1)^{k+1} z^{2k} / (2k (2k)!)
  double cin = z2 / 4.0;
  double cterm = z2 / 2.0;  // z^{2k} / (2k)!
  for (int k = 2; k < 60; ++k) {
    cterm *= z2 / ((2.0 * k - 1.0) * (2.0 * k));
    const double add = (k % 2 == 0 ? -1.0 : 1.0) * cterm / (2.0 * k);
    // sign: Cin = sum_{k>=1} (-1)^{k+1} z^{2k} / (2k (2k)!)
    cin += add;
    if (std::abs(add) < 1e-18 * std::abs(cin) + 1e-300) break;
  }
  const double Ci = euler_gamma + std::log(z) - cin;
  return {si_sum - pi / 2.0, -Ci};
}

// E1(i z) by modified Lentz continued fraction; valid for moderate z.
inline std::complex<double> e1_of_iz_cf(double z) {
  const std::complex<double> w(0.0, z);
  const double tiny = 1e-300;
  std::complex<double> b = w + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-w);
}

// Asymptotic auxiliary functions:
//   f(z) ~ (1/z) sum (-1)^k (2k)!/z^{2k},  g(z) ~ (1/z^2) sum (-1)^k (2k+1)!/z^{2k}
// with si = -(f cos z + g sin z), ci = g cos z - f sin z.
inline SiCi si_ci_asymptotic(double z) {
  const double z2 = z * z;
  double f = 0.0, g = 0.0, termf = 1.0, termg = 1.0;
  double prevf = std::numeric_limits<double>::max();
  for (int k = 0; k < 60; ++k) {
    if (std::abs(termf) > prevf) break;  // divergence point reached
    f += termf;
    g += termg;
    prevf = std::abs(termf);
    termf *= -(2.0 * k + 1.0) * (2.0 * k + 2.0) / z2;
    termg *= -(2.0 * k + 2.0) * (2.0 * k + 3.0) / z2;
  }
  f /= z;
  g /= z2;
  const double s = std::sin(z), c = std::cos(z);
  return {-(f * c + g * s), g * c - f * s};
}

}  // namespace detail

inline SiCi si_ci(double z) {
  if (!(z > 0.0)) throw domain_error("si_ci: argument must be positive");
  if (z < 4.0) return detail::si_ci_series(z);
  if (z < 40.0) {
    const auto e1 = detail::e1_of_iz_cf(z);
    return {e1.imag(), e1.real()};
  }
  return detail::si_ci_asymptotic(z);
}

// ---------------------------------------------------------------------------
// Laplace transform of the standard Half-Cauchy density:
//   f*_HC(z) = (2/pi) int_0^inf e^{-xz}/(1+x^2) dx
//            = -(2/pi) { sin(z) ci(z) + cos(z) si(z) }
// ---------------------------------------------------------------------------

inline double laplace_half_cauchy(double z) {
  if (z < 0.0)
    throw domain_error("laplace_half_cauchy: argument must be nonnegative");
  if (z == 0.0) return 1.0;
  if (z >= 40.0) {
    // f(z) asymptotic series; f* = (2/pi) f.
    const double z2 = z * z;
    double f = 0.0, term = 1.0, prev = std::numeric_limits<double>::max();
    for (int k = 0; k < 60; ++k) {
      if (std::abs(term) > prev) break;
      f += term;
      prev = std::abs(term);
      term *= -(2.0 * k + 1.0) * (2.0 * k + 2.0) / z2;
    }
    return (2.0 / pi) * f / z;
  }
  const auto sc = si_ci(z);
  return -(2.0 / pi) * (std::sin(z) * sc.ci + std::cos(z) * sc.si);
}

// ---------------------------------------------------------------------------
// Scaled exponential integral Ei(z)/e^z, overflow-free for all z > 0.
// Ramanujan series for z <= 40, asymptotic expansion beyond.
// ---------------------------------------------------------------------------

inline double ei_scaled(double z) {
  if (!(z > 0.0)) throw domain_error("ei_scaled: argument must be positive");
  if (z > 40.0) {
    double sum = 0.0, term = 1.0, prev = std::numeric_limits<double>::max();
    for (int k = 0; k < 200; ++k) {
      if (std::abs(term) > prev) break;
      sum += term;
      prev = std::abs(term);
      term *= (k + 1.0) / z;
    }
    return sum / z;
  }
  const double logz = std::log(z);
  double result = (euler_gamma + logz) * std::exp(-z);
  double log_npref = 0.0;  // log z^n - log n! - (n-1) log 2
  double odd_sum = 0.0;    // sum_{k<=floor((n-1)/2)} 1/(2k+1)
  for (int n = 1; n <= 400; ++n) {
    log_npref += logz - std::log(static_cast<double>(n));
    if (n > 1) log_npref -= std::log(2.0);
    if (n % 2 == 1) odd_sum += 1.0 / n;  // adds 1/(2k+1) at n = 2k+1
    const double term = ((n % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(log_npref - z / 2.0) * odd_sum;
    result += term;
    if (std::abs(term) < 1e-16 * std::abs(result) + 1e-300 && n > z) break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Log-space product factors for the Laplace inversion integrands.
// ---------------------------------------------------------------------------

/// log{ -f*_HC(a) + 2 cos a + 2 i sin a }
inline std::complex<double> log_factor_hc(double a) {
  if (!(a > 0.0)) throw domain_error("log_factor_hc: argument must be positive");
  const std::complex<double> factor(-laplace_half_cauchy(a) + 2.0 * std::cos(a),
                                    2.0 * std::sin(a));
  return std::log(factor);
}

/// log{ -Ei_2(a) + i pi a }  with Ei_2(a) = a Ei(a) - e^a, computed as
/// a + log{ 1 - a Ei(a)/e^a + i pi a e^{-a} } to avoid overflow.
inline std::complex<double> log_factor_pareto(double a) {
  if (!(a > 0.0))
    throw domain_error("log_factor_pareto: argument must be positive");
  const std::complex<double> inner(1.0 - a * ei_scaled(a),
                                   pi * a * std::exp(-a));
  return a + std::log(inner);
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta / gamma and their inverses
// ---------------------------------------------------------------------------

namespace detail {

inline double betacf(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  const double tiny = 1e-300;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

inline double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0)
    throw domain_error("reg_inc_beta: invalid arguments");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

inline double inv_reg_inc_beta(double u, double a, double b) {
  if (u < 0.0 || u > 1.0)
    throw domain_error("inv_reg_inc_beta: u outside [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);  // crude start; Newton with bisection safeguard
  for (int it = 0; it < 200; ++it) {
    const double f = reg_inc_beta(x, a, b) - u;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    if (std::abs(f) < 1e-15) break;
    const double lpdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                        (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double pdf = std::exp(lpdf);
    double xn = x - f / pdf;
    if (!(xn > lo) || !(xn < hi) || !std::isfinite(xn))
      xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-17 * (x + 1e-300)) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

namespace detail {

// Regularized lower incomplete gamma P(a, x); series + continued fraction.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw domain_error("gamma_p: invalid arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 1; n <= 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return 1.0 - q;
}

inline double gamma_q(double a, double x) {  // survival counterpart
  if (x < a + 1.0) return 1.0 - gamma_p(a, x);
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Acklam's rational approximation for the standard normal quantile,
// polished with one Halley step on erfc.
inline double normal_quantile(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double bq[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double cq[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double dq[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((cq[0] * q + cq[1]) * q + cq[2]) * q + cq[3]) * q + cq[4]) * q +
         cq[5]) /
        ((((dq[0] * q + dq[1]) * q + dq[2]) * q + dq[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((bq[0] * r + bq[1]) * r + bq[2]) * r + bq[3]) * r + bq[4]) * r +
         1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((cq[0] * q + cq[1]) * q + cq[2]) * q + cq[3]) * q + cq[4]) * q +
          cq[5]) /
        ((((dq[0] * q + dq[1]) * q + dq[2]) * q + dq[3]) * q + 1.0);
  }
  // One Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double g =
      e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);  // f / pdf
  x -= g / (1.0 + 0.5 * x * g);
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distribution kinds, CDFs, survivals, quantiles
// ---------------------------------------------------------------------------

struct DistKind {
  enum class Tag {
    Normal,
    StudentT,
    Chi2,
    FisherF,
    HotellingT2,
    HalfCauchy,
    Cauchy,
    Pareto11
  };

  Tag tag;
  double df = 0.0;  // StudentT
  int d = 0, k = 0;            // Chi2 (d), FisherF (d,k as d1,d2), HotellingT2 (d,k)

  static DistKind normal() { return {Tag::Normal}; }
  static DistKind student_t(double df) {
    if (!(df > 0.0)) throw domain_error("StudentT: df must be positive");
    DistKind r{Tag::StudentT};
    r.df = df;
    return r;
  }
  static DistKind chi2(int d) {
    if (d < 1) throw domain_error("Chi2: df must be positive");
    DistKind r{Tag::Chi2};
    r.d = d;
    return r;
  }
  static DistKind fisher_f(int d1, int d2) {
    if (d1 < 1 || d2 < 1) throw domain_error("FisherF: df must be positive");
    DistKind r{Tag::FisherF};
    r.d = d1;
    r.k = d2;
    return r;
  }
  static DistKind hotelling_t2(int d, int k) {
    if (d < 1 || k < d)
      throw domain_error("HotellingT2: requires k >= d >= 1");
    DistKind r{Tag::HotellingT2};
    r.d = d;
    r.k = k;
    return r;
  }
  static DistKind half_cauchy() { return {Tag::HalfCauchy}; }
  static DistKind cauchy() { return {Tag::Cauchy}; }
  static DistKind pareto11() { return {Tag::Pareto11}; }
};

/// Survival function 1 - CDF, computed branch-accurately in the tail.
inline double dist_survival(const DistKind& kind, double x) {
  using Tag = DistKind::Tag;
  switch (kind.tag) {
    case Tag::Normal:
      return 0.5 * std::erfc(x / std::sqrt(2.0));
    case Tag::StudentT: {
      const double k = kind.df;
      const double ib = reg_inc_beta(k / (k + x * x), k / 2.0, 0.5);
      return x >= 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
    }
    case Tag::Chi2:
      if (x <= 0.0) return 1.0;
      return detail::gamma_q(kind.d / 2.0, x / 2.0);
    case Tag::FisherF: {
      if (x <= 0.0) return 1.0;
      const double d1 = kind.d, d2 = kind.k;
      return reg_inc_beta(d2 / (d1 * x + d2), d2 / 2.0, d1 / 2.0);
    }
    case Tag::HotellingT2: {
      if (x <= 0.0) return 1.0;
      const double d = kind.d, k = kind.k;
      const double y = x * (k + 1.0 - d) / (d * k);
      return dist_survival(DistKind::fisher_f(kind.d, kind.k + 1 - kind.d), y);
    }
    case Tag::HalfCauchy:
      if (x <= 0.0) return 1.0;
      // 1 - (2/pi) arctan x = (2/pi) arctan(1/x), exact in the far tail
      return (2.0 / pi) * std::atan(1.0 / x);
    case Tag::Cauchy:
      if (x >= 0.0) return 0.5 - std::atan(x) / pi;
      return 1.0 - (0.5 - std::atan(-x) / pi);
    case Tag::Pareto11:
      if (x <= 1.0) return 1.0;
      return 1.0 / x;
  }
  throw std::logic_error("dist_survival: unreachable");
}

inline double dist_cdf(const DistKind& kind, double x) {
  using Tag = DistKind::Tag;
  switch (kind.tag) {
    case Tag::Normal:
      return 0.5 * std::erfc(-x / std::sqrt(2.0));
    case Tag::StudentT: {
      const double k = kind.df;
      const double ib = reg_inc_beta(k / (k + x * x), k / 2.0, 0.5);
      return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
    }
    default:
      return 1.0 - dist_survival(kind, x);
  }
}

inline double dist_quantile(const DistKind& kind, double u) {
  using Tag = DistKind::Tag;
  if (!(u > 0.0) || !(u < 1.0))
    throw domain_error("dist_quantile: u must lie in (0,1)");
  switch (kind.tag) {
    case Tag::Normal:
      return detail::normal_quantile(u);
    case Tag::StudentT: {
      const double k = kind.df;
      const double tail = u >= 0.5 ? 2.0 * (1.0 - u) : 2.0 * u;
      const double y = inv_reg_inc_beta(tail, k / 2.0, 0.5);
      const double x = std::sqrt(k * (1.0 - y) / y);
      return u >= 0.5 ? x : -x;
    }
    case Tag::Chi2: {
      // Newton on P(a, x/2) with bisection safeguard.
      const double a = kind.d / 2.0;
      double lo = 0.0, hi = 1.0;
      while (detail::gamma_p(a, hi / 2.0) < u && hi < 1e12) hi *= 2.0;
      double x = static_cast<double>(kind.d);
      for (int it = 0; it < 200; ++it) {
        const double f = detail::gamma_p(a, x / 2.0) - u;
        if (f > 0.0)
          hi = x;
        else
          lo = x;
        const double lpdf = (a - 1.0) * std::log(x / 2.0) - x / 2.0 -
                            std::lgamma(a) - std::log(2.0);
        double xn = x - f / std::exp(lpdf);
        if (!(xn > lo) || !(xn < hi) || !std::isfinite(xn))
          xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-14 * (x + 1.0)) return xn;
        x = xn;
      }
      return x;
    }
    case Tag::FisherF: {
      const double d1 = kind.d, d2 = kind.k;
      const double t = inv_reg_inc_beta(u, d1 / 2.0, d2 / 2.0);
      if (t >= 1.0) return std::numeric_limits<double>::infinity();
      return d2 * t / (d1 * (1.0 - t));
    }
    case Tag::HotellingT2: {
      const double d = kind.d, k = kind.k;
      const double f =
          dist_quantile(DistKind::fisher_f(kind.d, kind.k + 1 - kind.d), u);
      return f * d * k / (k + 1.0 - d);
    }
    case Tag::HalfCauchy:
      return std::tan(pi * u / 2.0);
    case Tag::Cauchy:
      return std::tan(pi * (u - 0.5));
    case Tag::Pareto11:
      return 1.0 / (1.0 - u);
  }
  throw std::logic_error("dist_quantile: unreachable");
}

/// F^{-1}(1 - p), accurate for p far below machine resolution of 1-p.
inline double dist_upper_quantile(const DistKind& kind, double p) {
  using Tag = DistKind::Tag;
  switch (kind.tag) {
    case Tag::HalfCauchy:
      if (p >= 1.0) return 0.0;
      return 1.0 / std::tan(pi * p / 2.0);
    case Tag::Pareto11:
      return 1.0 / p;
    case Tag::Cauchy:
      if (p == 1.0) return -std::numeric_limits<double>::infinity();
      return 1.0 / std::tan(pi * p);
    case Tag::Normal:
      if (p >= 0.5) return detail::normal_quantile(1.0 - p);
      return -detail::normal_quantile(p);
    default:
      return dist_quantile(kind, 1.0 - p);
  }
}

// ---------------------------------------------------------------------------
// Landau distribution (alpha = beta = 1 stable family)
//   f(x; mu, c) = (1/(c pi)) int_0^inf e^{-t} cos{ (x-mu) t / c
//                                                 + (2/pi) t log(t/c) } dt
// evaluated by direct adaptive quadrature of the oscillatory integral.
// ---------------------------------------------------------------------------

struct LandauParams {
  double mu = 0.0;
  double c = 1.0;
};

namespace detail {

inline double landau_phase(double t, double x, const LandauParams& p) {
  // t log(t/c) -> 0 as t -> 0
  const double tl = t > 0.0 ? t * std::log(t / p.c) : 0.0;
  return (x - p.mu) * t / p.c + (2.0 / pi) * tl;
}

// e^{-t} is below 1e-20 past t = 46; integrate [0, 46] adaptively.
inline constexpr double landau_t_max = 46.0;

inline std::vector<double> landau_seeds(double freq) {
  // Break the integration range so each initial panel holds only a few
  // oscillations; adaptive refinement handles the rest.
  std::vector<double> seeds;
  const double period = 2.0 * pi / std::max(std::abs(freq), 0.5);
  const double step = std::max(std::min(4.0 * period, 4.0), 0.01);
  for (double t = step; t < landau_t_max; t += step) seeds.push_back(t);
  return seeds;
}

}  // namespace detail

inline double landau_pdf(double x, const LandauParams& p) {
  if (!(p.c > 0.0)) throw domain_error("landau_pdf: scale must be positive");
  const double freq = (x - p.mu) / p.c;
  auto integrand = [&](double t) {
    return std::exp(-t) * std::cos(detail::landau_phase(t, x, p));
  };
  const auto r = quad::integrate(integrand, 0.0, detail::landau_t_max, 1e-10,
                                 400000, detail::landau_seeds(freq));
  const double v = r.value / (p.c * pi);
  return v > 0.0 ? v : 0.0;
}

inline double landau_cdf(double x, const LandauParams& p) {
  if (!(p.c > 0.0)) throw domain_error("landau_cdf: scale must be positive");
  const double x0 = p.mu - 10.0 * p.c;  // mass below is < 1e-12
  if (x <= x0) return 0.0;
  const double freq = std::max(std::abs(x - p.mu), std::abs(x0 - p.mu)) / p.c;
  auto integrand = [&](double t) {
    const double tt = std::max(t, 1e-12);
    return std::exp(-tt) *
           (std::sin(detail::landau_phase(tt, x, p)) -
            std::sin(detail::landau_phase(tt, x0, p))) /
           tt;
  };
  const auto r = quad::integrate(integrand, 0.0, detail::landau_t_max, 1e-10,
                                 400000, detail::landau_seeds(freq));
  const double v = r.value / pi;
  return std::min(std::max(v, 0.0), 1.0);
}

inline double landau_quantile(double u, const LandauParams& p) {
  if (!(u > 0.0) || !(u < 1.0))
    throw domain_error("landau_quantile: u must lie in (0,1)");
  // Bracket: left of the mode the CDF dives super-exponentially; the right
  // tail obeys 1 - F ~ (2c/pi)/(x - mu).
  double lo = p.mu - 10.0 * p.c;
  double hi = u > 0.9 ? p.mu + (2.0 * p.c / pi) / (1.0 - u) * 4.0
                      : p.mu + 10.0 * p.c;
  while (landau_cdf(hi, p) < u) hi = p.mu + (hi - p.mu) * 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (landau_cdf(mid, p) < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * (std::abs(hi) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace heavytail
