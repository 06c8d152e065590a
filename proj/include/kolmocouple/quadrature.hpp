#pragma once

#include "kolmocouple/common.hpp"

#include <functional>
#include <vector>

namespace kolmocouple {

using Fn1d = std::function<double(double)>;
using FnNd = std::function<double(const Vec&)>;

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_intervals = 20000;
};

/// Adaptive Gauss–Kronrod 7/15 on [a, b]. Throws QuadratureError if the
/// interval budget is exhausted before the tolerance is met.
double integrate_1d(const Fn1d& f, double a, double b,
                    const QuadratureOptions& opt = {});

/// Adaptive tensor quadrature over an axis-aligned box (iterated 1D).
double integrate_box(const FnNd& f, const Vec& lo, const Vec& hi,
                     const QuadratureOptions& opt = {});

/// Gauss–Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Integral of f over the unit sphere S^{d-1} in R^d (d = 2 or 3), surface
/// measure. Escalates the angular order until two successive estimates agree.
double sphere_integral(int d, const std::function<double(const Vec&)>& f,
                       double rel_tol = 1e-10);

/// Surface area of S^{d-1}.
double sphere_area(int d);

}  // namespace kolmocouple
