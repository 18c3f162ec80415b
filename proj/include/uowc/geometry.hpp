#pragma once

#include <cmath>
#include <vector>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"
#include "uowc/numerics.hpp"

namespace uowc {

/// Nearest-neighbour distance law for a transmitter at the top face of the
/// slab R^2 x [0, R], with planar intensity Lambda and uniform heights
/// (3D intensity Lambda / R).
///
/// Survival has two branches, joined continuously at s = R:
///   S(s) = exp(-2 pi Lambda s^3 / (3R))        for s <= R
///   S(s) = exp(-pi Lambda (s^2 - R^2 / 3))     for s >  R
class NNDistribution {
 public:
  NNDistribution(double lambda_2d, double slab_depth) : lambda_(lambda_2d), depth_(slab_depth) {
    if (!(lambda_2d > 0.0) || !std::isfinite(lambda_2d)) throw DomainError("NNDistribution: lambda_2d must be > 0");
    if (!(slab_depth > 0.0) || !std::isfinite(slab_depth)) throw DomainError("NNDistribution: slab_depth must be > 0");
  }

  explicit NNDistribution(const SystemParams& p) : NNDistribution(p->lambda_2d, p->slab_depth) {}

  double lambda_2d() const noexcept { return lambda_; }
  double slab_depth() const noexcept { return depth_; }

  /// -ln S(s), the expected number of points in the half-ball of radius s.
  double hazard(double s) const {
    check_distance(s);
    if (s <= depth_) return 2.0 * pi * lambda_ * s * s * s / (3.0 * depth_);
    return pi * lambda_ * (s * s - depth_ * depth_ / 3.0);
  }

  double survival(double s) const { return std::exp(-hazard(s)); }

  double cdf(double s) const { return -std::expm1(-hazard(s)); }

  double pdf(double s) const {
    check_distance(s);
    const double rate = s <= depth_ ? 2.0 * pi * lambda_ * s * s / depth_ : 2.0 * pi * lambda_ * s;
    return rate * survival(s);
  }

  /// Hazard accumulated over the first branch, 2 pi Lambda R^2 / 3.
  double branch_hazard() const noexcept { return 2.0 * pi * lambda_ * depth_ * depth_ / 3.0; }

  /// Exact inversion of the CDF for u in [0, 1).
  double inverse_cdf(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("inverse_cdf: u must lie in [0, 1)");
    const double t = -std::log1p(-u);
    if (t <= branch_hazard()) return std::cbrt(3.0 * depth_ * t / (2.0 * pi * lambda_));
    return std::sqrt(t / (pi * lambda_) + depth_ * depth_ / 3.0);
  }

  double median() const { return inverse_cdf(0.5); }

  /// Distance at which the first-branch hazard reaches 1, (3R / (2 pi Lambda))^(1/3).
  double length_scale() const noexcept { return std::cbrt(3.0 * depth_ / (2.0 * pi * lambda_)); }

  /// E[Z0] = 1/2 int_0^R S(s) ds by adaptive Simpson.
  double expected_link_depth(double rel_tol = 1e-10) const {
    return 0.5 * integrate_first_branch([this](double s) { return survival(s); }, rel_tol);
  }

  /// E[L] = int_0^inf S(s) ds. The part beyond R is the closed Gaussian tail
  ///   exp(-2 pi Lambda R^2 / 3) * erfcx(sqrt(pi Lambda) R) / (2 sqrt(Lambda)).
  double mean_distance(double rel_tol = 1e-10) const {
    const double head = integrate_first_branch([this](double s) { return survival(s); }, rel_tol);
    return head + survival_tail();
  }

  /// int_R^inf S(s) ds in closed form.
  double survival_tail() const {
    const double x = std::sqrt(pi * lambda_) * depth_;
    return std::exp(-branch_hazard()) * numerics::erfcx(x) / (2.0 * std::sqrt(lambda_));
  }

  /// Panel breakpoints on [0, R] at multiples of the survival length scale.
  std::vector<double> first_branch_breakpoints() const {
    std::vector<double> bp{0.0, depth_};
    const double scale = length_scale();
    for (double k : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0}) {
      if (k * scale < depth_) bp.push_back(k * scale);
    }
    return bp;
  }

 private:
  void check_distance(double s) const {
    if (!(s >= 0.0)) throw DomainError("nearest-neighbour distance must be >= 0");
  }

  template <class F>
  double integrate_first_branch(F f, double rel_tol) const {
    return numerics::integrate_panels(f, first_branch_breakpoints(), rel_tol);
  }

  double lambda_;
  double depth_;
};

}  // namespace uowc
