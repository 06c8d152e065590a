#pragma once

#include "kolmocouple/common.hpp"
#include "kolmocouple/measures.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kolmocouple {

/// A C^2 scalar function with analytic gradient and Hessian. Compactly
/// supported kinds evaluate to exactly zero (with zero derivatives) outside
/// their support box; unbounded kinds (plain monomials, squared norms) carry
/// an infinite box and may only be used where no integration is involved.
struct TestFunction {
    std::string label;
    SupportBox support;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
    /// crude max of |f| + |grad f| + |D^2 f| over the support, for scaling
    /// residual magnitudes; 1 for unbounded kinds
    double c2_scale = 1.0;
};

/// (1 - |x-c|^2/R^2)^3 inside the ball of radius R around c, zero outside.
/// The cubic power is the smallest making the extension C^2.
TestFunction poly_bump(const Vec& center, double radius);

/// x_axis * poly_bump: first-moment sensitive variant.
TestFunction coordinate_bump(const Vec& center, double radius, int axis);

/// Gaussian envelope exp(-|x-c|^2 / (2 s^2)); support box truncated where
/// the values drop below machine noise (8.6 s).
TestFunction gaussian_bump(const Vec& center, double s);

/// Quintic smoothstep profile: 1 for |t| <= 1, 0 for |t| >= 2, C^2 monotone
/// in between. Scalar value/derivatives.
double cutoff_profile(double t);
double cutoff_profile_d1(double t);
double cutoff_profile_d2(double t);

/// prod_i z_i^{p_i} times a radial C^2 taper equal to 1 for |z| <= inner and
/// 0 for |z| >= inner * 2.
TestFunction tapered_monomial(int dim, const std::vector<int>& powers, double inner);

/// Radial taper alone (monomial of all-zero powers).
TestFunction radial_taper(int dim, double inner);

/// Pointwise product with support intersection and product-rule derivatives.
TestFunction product(const TestFunction& f, const TestFunction& g);

enum class CutoffMode { quadratic_arg, log_arg };

/// V(z) = |z|^2 with analytic derivatives, on R^dim.
TestFunction squared_norm(int dim);

/// Cutoff family built from a C^2 argument function V >= 0:
///   quadratic_arg: f(V(z)/j)          (plateau {V < j}, zero outside {V > 2j})
///   log_arg:       f(ln(1+V(z))/j)
/// where f is cutoff_profile. V defaults to |z|^2 when omitted.
TestFunction cutoff_family(int j, CutoffMode mode, const TestFunction& V);
TestFunction cutoff_family(int j, CutoffMode mode, int dim);

/// Deterministic battery for weak-form residuals: poly bumps at stratified
/// centers with mixed radii, plus coordinate-weighted variants.
std::vector<TestFunction> default_battery(int dim, const SupportBox& box, int count,
                                          std::uint64_t seed);

}  // namespace kolmocouple
