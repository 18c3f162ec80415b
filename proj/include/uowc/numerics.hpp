#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "uowc/errors.hpp"

namespace uowc::numerics {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double eps,
                    int depth, int min_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || (min_depth <= 0 && std::abs(delta) <= 15.0 * eps)) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, min_depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, min_depth - 1);
}

template <class F>
double simpson_coarse(F& f, double a, double b, int n) {
  // composite Simpson, n even
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace detail

/// Adaptive Simpson on [a, b] to absolute tolerance `abs_tol`.
template <class F>
double adaptive_simpson(F f, double a, double b, double abs_tol, int max_depth = 48) {
  if (b == a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, 4);
}

/// Integrates over consecutive panels [p0,p1], [p1,p2], ... with a relative
/// tolerance on the total. Breakpoints must be non-decreasing; duplicates are
/// skipped. Splitting at kinks and at the integrand's length scale is the
/// caller's job.
template <class F>
double integrate_panels(F f, std::vector<double> breakpoints, double rel_tol) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.size() < 2) return 0.0;

  std::vector<double> coarse(breakpoints.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    coarse[i] = detail::simpson_coarse(f, breakpoints[i], breakpoints[i + 1], 16);
    total += std::abs(coarse[i]);
  }
  const double floor = std::max(total * rel_tol * 1e-3, std::numeric_limits<double>::min());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double eps = std::max(rel_tol * std::abs(coarse[i]), floor);
    sum += adaptive_simpson(f, breakpoints[i], breakpoints[i + 1], eps);
  }
  return sum;
}

/// Bisection for a root of f on [lo, hi]. Requires f(lo) and f(hi) of
/// opposite sign (or one of them zero). Stops when the bracket is narrower
/// than x_tol or stops shrinking.
template <class F>
double bisect(F f, double lo, double hi, double x_tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) throw BracketError("bisect: no sign change on bracket");
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
Extremum golden_section_maximize(F f, double lo, double hi, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
    if (!(x1 < x2)) break;
  }
  return f1 >= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

/// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
inline double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; truncation error below 1e-10 relative for x >= 25.
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - 0.5 * inv2 + 0.75 * inv2 * inv2 - 1.875 * inv2 * inv2 * inv2;
  return series / (x * std::sqrt(std::numbers::pi));
}

/// n values from start to stop inclusive; geometric when `log_spaced`.
inline std::vector<double> linspace(double start, double stop, std::size_t n, bool log_spaced = false) {
  std::vector<double> out;
  if (n == 0) return out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(start);
    return out;
  }
  if (log_spaced) {
    const double la = std::log10(start);
    const double lb = std::log10(stop);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(std::pow(10.0, la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }
  return out;
}

}  // namespace uowc::numerics
