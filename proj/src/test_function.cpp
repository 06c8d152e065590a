#include "kolmocouple/test_function.hpp"

#include "kolmocouple/rng.hpp"

#include <cmath>
#include <limits>

namespace kolmocouple {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SupportBox infinite_box(int dim) {
    return {Vec::Constant(dim, -kInf), Vec::Constant(dim, kInf)};
}

double estimate_c2_scale(const TestFunction& f, std::uint64_t key) {
    if (!f.support.finite()) return 1.0;
    const int d = f.support.dim();
    CounterStream stream(key, 0xc2);
    double scale = 0.0;
    for (int i = 0; i < 256; ++i) {
        Vec x(d);
        for (int a = 0; a < d; ++a)
            x[a] = f.support.lo[a] +
                   stream.next_uniform() * (f.support.hi[a] - f.support.lo[a]);
        scale = std::max(scale, std::fabs(f.value(x)) + f.gradient(x).norm() +
                                    f.hessian(x).norm());
    }
    return std::max(scale, 1e-12);
}

}  // namespace

TestFunction poly_bump(const Vec& center, double radius) {
    if (!(radius > 0)) throw InvalidParameterError("poly_bump: radius must be > 0");
    const int d = static_cast<int>(center.size());
    const double r2 = radius * radius;
    TestFunction f;
    f.label = "poly_bump(r=" + std::to_string(radius) + ")";
    f.support = SupportBox::ball_bounds(center, radius);
    f.value = [center, r2](const Vec& x) {
        const double u = (x - center).squaredNorm() / r2;
        if (u >= 1.0) return 0.0;
        const double w = 1.0 - u;
        return w * w * w;
    };
    f.gradient = [center, r2, d](const Vec& x) -> Vec {
        const Vec z = x - center;
        const double u = z.squaredNorm() / r2;
        if (u >= 1.0) return Vec::Zero(d);
        const double w = 1.0 - u;
        return (-3.0 * w * w) * (2.0 / r2) * z;
    };
    f.hessian = [center, r2, d](const Vec& x) -> Mat {
        const Vec z = x - center;
        const double u = z.squaredNorm() / r2;
        if (u >= 1.0) return Mat::Zero(d, d);
        const double w = 1.0 - u;
        const Vec du = (2.0 / r2) * z;
        return 6.0 * w * du * du.transpose() +
               (-3.0 * w * w) * (2.0 / r2) * Mat::Identity(d, d);
    };
    f.c2_scale = estimate_c2_scale(f, 0x9b1);
    return f;
}

TestFunction coordinate_bump(const Vec& center, double radius, int axis) {
    const int d = static_cast<int>(center.size());
    if (axis < 0 || axis >= d)
        throw InvalidParameterError("coordinate_bump: axis out of range");
    TestFunction bump = poly_bump(center, radius);
    TestFunction f;
    f.label = "x" + std::to_string(axis + 1) + "*" + bump.label;
    f.support = bump.support;
    f.value = [bump, axis](const Vec& x) { return x[axis] * bump.value(x); };
    f.gradient = [bump, axis](const Vec& x) -> Vec {
        Vec g = x[axis] * bump.gradient(x);
        g[axis] += bump.value(x);
        return g;
    };
    f.hessian = [bump, axis](const Vec& x) -> Mat {
        Mat h = x[axis] * bump.hessian(x);
        const Vec g = bump.gradient(x);
        h.row(axis) += g.transpose();
        h.col(axis) += g;
        return h;
    };
    f.c2_scale = estimate_c2_scale(f, 0x9b2);
    return f;
}

TestFunction gaussian_bump(const Vec& center, double s) {
    if (!(s > 0)) throw InvalidParameterError("gaussian_bump: scale must be > 0");
    const int d = static_cast<int>(center.size());
    const double inv = 1.0 / (s * s);
    TestFunction f;
    f.label = "gaussian_bump(s=" + std::to_string(s) + ")";
    f.support = SupportBox::ball_bounds(center, 8.6 * s);
    SupportBox box = f.support;
    f.value = [center, inv, box](const Vec& x) {
        if (!box.contains(x)) return 0.0;
        return std::exp(-0.5 * inv * (x - center).squaredNorm());
    };
    f.gradient = [center, inv, box, d](const Vec& x) -> Vec {
        if (!box.contains(x)) return Vec::Zero(d);
        const Vec z = x - center;
        return std::exp(-0.5 * inv * z.squaredNorm()) * (-inv) * z;
    };
    f.hessian = [center, inv, box, d](const Vec& x) -> Mat {
        if (!box.contains(x)) return Mat::Zero(d, d);
        const Vec z = x - center;
        const double v = std::exp(-0.5 * inv * z.squaredNorm());
        return v * (inv * inv * z * z.transpose() - inv * Mat::Identity(d, d));
    };
    f.c2_scale = estimate_c2_scale(f, 0x9b3);
    return f;
}

double cutoff_profile(double t) {
    t = std::fabs(t);
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double u = 2.0 - t;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double cutoff_profile_d1(double t) {
    const double a = std::fabs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double u = 2.0 - a;
    const double s1 = u * u * (30.0 + u * (-60.0 + 30.0 * u));
    return (t > 0 ? -1.0 : 1.0) * s1;
}

double cutoff_profile_d2(double t) {
    const double a = std::fabs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double u = 2.0 - a;
    return u * (60.0 + u * (-180.0 + 120.0 * u));
}

namespace {

// radial taper value/derivatives wrt z, t = |z| / inner
void taper_eval(const Vec& z, double inner, double& T, Vec& dT, Mat& d2T) {
    const int d = static_cast<int>(z.size());
    const double r = z.norm();
    const double t = r / inner;
    T = cutoff_profile(t);
    if (t <= 1.0 || t >= 2.0) {
        dT = Vec::Zero(d);
        d2T = Mat::Zero(d, d);
        return;
    }
    const double f1 = cutoff_profile_d1(t);
    const double f2 = cutoff_profile_d2(t);
    const Vec u = z / r;
    dT = (f1 / inner) * u;
    d2T = (f2 / (inner * inner)) * u * u.transpose() +
          (f1 / (inner * r)) * (Mat::Identity(d, d) - u * u.transpose());
}

void monomial_eval(const Vec& z, const std::vector<int>& p, double& m, Vec& dm,
                   Mat& d2m) {
    const int d = static_cast<int>(z.size());
    m = 1.0;
    for (int a = 0; a < d; ++a)
        for (int k = 0; k < p[a]; ++k) m *= z[a];
    auto partial = [&](int skip_axis, int times) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) {
            const int pw = (a == skip_axis) ? p[a] - times : p[a];
            for (int k = 0; k < pw; ++k) v *= z[a];
        }
        return v;
    };
    dm.resize(d);
    d2m.resize(d, d);
    for (int a = 0; a < d; ++a)
        dm[a] = p[a] > 0 ? p[a] * partial(a, 1) : 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (a == b) {
                d2m(a, a) = p[a] > 1 ? p[a] * (p[a] - 1) * partial(a, 2) : 0.0;
            } else {
                if (p[a] > 0 && p[b] > 0) {
                    double v = p[a] * p[b];
                    for (int c = 0; c < d; ++c) {
                        const int pw = p[c] - (c == a ? 1 : 0) - (c == b ? 1 : 0);
                        for (int k = 0; k < pw; ++k) v *= z[c];
                    }
                    d2m(a, b) = v;
                } else {
                    d2m(a, b) = 0.0;
                }
            }
        }
    }
}

}  // namespace

TestFunction tapered_monomial(int dim, const std::vector<int>& powers, double inner) {
    if (static_cast<int>(powers.size()) != dim)
        throw InvalidParameterError("tapered_monomial: powers rank mismatch");
    if (!(inner > 0)) throw InvalidParameterError("tapered_monomial: inner must be > 0");
    std::vector<int> p = powers;
    TestFunction f;
    std::string lbl = "monomial(";
    for (int a = 0; a < dim; ++a) lbl += std::to_string(p[a]) + (a + 1 < dim ? "," : "");
    f.label = lbl + ")*taper(" + std::to_string(inner) + ")";
    f.support = SupportBox::cube(dim, 2.0 * inner);
    f.value = [p, inner, dim](const Vec& z) {
        if (z.norm() >= 2.0 * inner) return 0.0;
        double m, T;
        Vec dm, dT;
        Mat d2m, d2T;
        monomial_eval(z, p, m, dm, d2m);
        taper_eval(z, inner, T, dT, d2T);
        return m * T;
    };
    f.gradient = [p, inner, dim](const Vec& z) -> Vec {
        if (z.norm() >= 2.0 * inner) return Vec::Zero(dim);
        double m, T;
        Vec dm, dT;
        Mat d2m, d2T;
        monomial_eval(z, p, m, dm, d2m);
        taper_eval(z, inner, T, dT, d2T);
        return T * dm + m * dT;
    };
    f.hessian = [p, inner, dim](const Vec& z) -> Mat {
        if (z.norm() >= 2.0 * inner) return Mat::Zero(dim, dim);
        double m, T;
        Vec dm, dT;
        Mat d2m, d2T;
        monomial_eval(z, p, m, dm, d2m);
        taper_eval(z, inner, T, dT, d2T);
        return T * d2m + m * d2T + dm * dT.transpose() + dT * dm.transpose();
    };
    f.c2_scale = estimate_c2_scale(f, 0x9b4);
    return f;
}

TestFunction radial_taper(int dim, double inner) {
    return tapered_monomial(dim, std::vector<int>(dim, 0), inner);
}

TestFunction product(const TestFunction& f, const TestFunction& g) {
    TestFunction h;
    h.label = f.label + "*" + g.label;
    const int d = f.support.dim();
    h.support.lo = f.support.lo.cwiseMax(g.support.lo);
    h.support.hi = f.support.hi.cwiseMin(g.support.hi);
    auto fv = f.value, gv = g.value;
    auto fg = f.gradient, gg = g.gradient;
    auto fh = f.hessian, gh = g.hessian;
    h.value = [fv, gv](const Vec& x) { return fv(x) * gv(x); };
    h.gradient = [fv, gv, fg, gg](const Vec& x) -> Vec {
        return fv(x) * gg(x) + gv(x) * fg(x);
    };
    h.hessian = [fv, gv, fg, gg, fh, gh](const Vec& x) -> Mat {
        const Vec df = fg(x), dg = gg(x);
        return fv(x) * gh(x) + gv(x) * fh(x) + df * dg.transpose() +
               dg * df.transpose();
    };
    h.c2_scale = estimate_c2_scale(h, 0x9b5);
    (void)d;
    return h;
}

TestFunction squared_norm(int dim) {
    TestFunction f;
    f.label = "|z|^2";
    f.support = infinite_box(dim);
    f.value = [](const Vec& z) { return z.squaredNorm(); };
    f.gradient = [](const Vec& z) -> Vec { return 2.0 * z; };
    f.hessian = [dim](const Vec&) -> Mat { return 2.0 * Mat::Identity(dim, dim); };
    return f;
}

TestFunction cutoff_family(int j, CutoffMode mode, const TestFunction& V) {
    if (j < 1) throw InvalidParameterError("cutoff_family: j must be >= 1");
    const int d = V.support.dim();
    TestFunction f;
    f.label = std::string(mode == CutoffMode::quadratic_arg ? "cutoff_quad(j="
                                                            : "cutoff_log(j=") +
              std::to_string(j) + ")";
    f.support = infinite_box(d);
    const double jd = static_cast<double>(j);
    auto Vv = V.value, Vg_ = V.value;
    (void)Vg_;
    auto Vgrad = V.gradient;
    auto Vhess = V.hessian;
    if (mode == CutoffMode::quadratic_arg) {
        f.value = [Vv, jd](const Vec& z) { return cutoff_profile(Vv(z) / jd); };
        f.gradient = [Vv, Vgrad, jd](const Vec& z) -> Vec {
            const double t = Vv(z) / jd;
            return (cutoff_profile_d1(t) / jd) * Vgrad(z);
        };
        f.hessian = [Vv, Vgrad, Vhess, jd](const Vec& z) -> Mat {
            const double t = Vv(z) / jd;
            const Vec g = Vgrad(z);
            return (cutoff_profile_d2(t) / (jd * jd)) * g * g.transpose() +
                   (cutoff_profile_d1(t) / jd) * Vhess(z);
        };
    } else {
        f.value = [Vv, jd](const Vec& z) {
            return cutoff_profile(std::log1p(Vv(z)) / jd);
        };
        f.gradient = [Vv, Vgrad, jd](const Vec& z) -> Vec {
            const double v = Vv(z);
            const double t = std::log1p(v) / jd;
            return (cutoff_profile_d1(t) / (jd * (1.0 + v))) * Vgrad(z);
        };
        f.hessian = [Vv, Vgrad, Vhess, jd](const Vec& z) -> Mat {
            const double v = Vv(z);
            const double t = std::log1p(v) / jd;
            const double den = jd * (1.0 + v);
            const Vec g = Vgrad(z);
            const double f1 = cutoff_profile_d1(t);
            const double f2 = cutoff_profile_d2(t);
            return (f2 / (den * den)) * g * g.transpose() +
                   f1 * (Vhess(z) / den - g * g.transpose() / (jd * (1.0 + v) * (1.0 + v)));
        };
    }
    return f;
}

TestFunction cutoff_family(int j, CutoffMode mode, int dim) {
    TestFunction f = cutoff_family(j, mode, squared_norm(dim));
    // with V = |z|^2 the outer region is an explicit ball
    const double r2 = (mode == CutoffMode::quadratic_arg)
                          ? 2.0 * static_cast<double>(j)
                          : std::expm1(2.0 * static_cast<double>(j));
    if (std::isfinite(r2)) f.support = SupportBox::cube(dim, std::sqrt(r2));
    return f;
}

std::vector<TestFunction> default_battery(int dim, const SupportBox& box, int count,
                                          std::uint64_t seed) {
    if (count < 1) throw InvalidParameterError("default_battery: count must be >= 1");
    if (box.dim() != dim)
        throw InvalidParameterError("default_battery: box dimension mismatch");
    CounterStream stream(seed, 0xbadbeef);
    double min_extent = kInf;
    for (int a = 0; a < dim; ++a)
        min_extent = std::min(min_extent, box.hi[a] - box.lo[a]);
    std::vector<TestFunction> battery;
    battery.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec c(dim);
        for (int a = 0; a < dim; ++a) {
            const double extent = box.hi[a] - box.lo[a];
            c[a] = box.lo[a] + (0.1 + 0.8 * stream.next_uniform()) * extent;
        }
        const double radius = min_extent * (0.08 + 0.22 * stream.next_uniform());
        if (i % 3 == 2)
            battery.push_back(coordinate_bump(c, radius, i % dim));
        else
            battery.push_back(poly_bump(c, radius));
    }
    return battery;
}

}  // namespace kolmocouple
