#include "kolmocouple/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace kolmocouple {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (positive half, symmetric).
constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

struct GKResult {
    double value;
    double error;
};

GKResult gk15(const Fn1d& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGK15Nodes[i]);
        fv[14 - i] = f(c + h * kGK15Nodes[i]);
    }
    fv[7] = f(c);
    double kron = kGK15Weights[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += kGK15Weights[i] * (fv[i] + fv[14 - i]);
    double gauss = kG7Weights[3] * fv[7];
    for (int i = 0; i < 3; ++i) {
        const int j = 2 * i + 1;  // Gauss points sit at odd Kronrod indices
        gauss += kG7Weights[i] * (fv[j] + fv[14 - j]);
    }
    const double diff = std::fabs(kron - gauss) * h;
    // QUADPACK-style sharpened error estimate
    const double err = diff > 0 ? std::pow(200.0 * diff, 1.5) : 0.0;
    return {kron * h, std::min(diff, err > 0 ? err : diff)};
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

double integrate_1d(const Fn1d& f, double a, double b, const QuadratureOptions& opt) {
    if (a == b) return 0.0;
    std::priority_queue<Interval> queue;
    GKResult r = gk15(f, a, b);
    queue.push({a, b, r.value, r.error});
    double total = r.value;
    double total_err = r.error;
    int used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (used >= opt.max_intervals)
            throw QuadratureError("integrate_1d: interval budget exhausted", total,
                                  total_err);
        Interval worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at rounding resolution; accept its estimate as-is
            total_err -= worst.error;
            if (queue.empty()) break;
            continue;
        }
        GKResult left = gk15(f, worst.a, mid);
        GKResult right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push({worst.a, mid, left.value, left.error});
        queue.push({mid, worst.b, right.value, right.error});
        ++used;
    }
    return total;
}

double integrate_box(const FnNd& f, const Vec& lo, const Vec& hi,
                     const QuadratureOptions& opt) {
    const int d = static_cast<int>(lo.size());
    if (d == 1) {
        Vec x(1);
        return integrate_1d(
            [&](double t) {
                Vec p(1);
                p[0] = t;
                return f(p);
            },
            lo[0], hi[0], opt);
    }
    // integrate over the last axis outermost; inner integrals get a tighter
    // relative tolerance so their noise does not poison the outer estimate
    QuadratureOptions inner = opt;
    inner.rel_tol = opt.rel_tol * 0.25;
    inner.abs_tol = opt.abs_tol * 0.25;
    Vec lo_in = lo.head(d - 1), hi_in = hi.head(d - 1);
    return integrate_1d(
        [&](double t) {
            return integrate_box(
                [&, t](const Vec& p) {
                    Vec full(d);
                    full.head(d - 1) = p;
                    full[d - 1] = t;
                    return f(full);
                },
                lo_in, hi_in, inner);
        },
        lo[d - 1], hi[d - 1], opt);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    {
        std::scoped_lock lock(mtx);
        auto it = cache.find(n);
        if (it != cache.end()) {
            nodes = it->second.first;
            weights = it->second.second;
            return;
        }
    }
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    std::scoped_lock lock(mtx);
    cache.emplace(n, std::make_pair(nodes, weights));
}

double sphere_area(int d) {
    // 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {

double sphere_integral_order(int d, const std::function<double(const Vec&)>& f, int n) {
    if (d == 2) {
        // periodic trapezoid over the angle, spectrally accurate
        double s = 0.0;
        Vec p(2);
        for (int k = 0; k < n; ++k) {
            const double phi = 2.0 * M_PI * k / n;
            p[0] = std::cos(phi);
            p[1] = std::sin(phi);
            s += f(p);
        }
        return s * (2.0 * M_PI / n);
    }
    // d == 3: Gauss-Legendre in cos(theta) x trapezoid in phi
    std::vector<double> u, w;
    gauss_legendre(n, u, w);
    const int m = 2 * n;
    double s = 0.0;
    Vec p(3);
    for (int i = 0; i < n; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
        double ring = 0.0;
        for (int k = 0; k < m; ++k) {
            const double phi = 2.0 * M_PI * k / m;
            p[0] = st * std::cos(phi);
            p[1] = st * std::sin(phi);
            p[2] = u[i];
            ring += f(p);
        }
        s += w[i] * ring * (2.0 * M_PI / m);
    }
    return s;
}

}  // namespace

double sphere_integral(int d, const std::function<double(const Vec&)>& f,
                       double rel_tol) {
    if (d == 1) {
        Vec p(1);
        p[0] = 1.0;
        const double a = f(p);
        p[0] = -1.0;
        return a + f(p);
    }
    if (d != 2 && d != 3)
        throw InvalidParameterError("sphere_integral: d must be 1, 2 or 3");
    double prev = sphere_integral_order(d, f, 8);
    for (int n = 16; n <= 256; n *= 2) {
        const double cur = sphere_integral_order(d, f, n);
        if (std::fabs(cur - prev) <= rel_tol * (std::fabs(cur) + 1e-300) + 1e-14)
            return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace kolmocouple
