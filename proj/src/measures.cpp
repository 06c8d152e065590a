#include "kolmocouple/measures.hpp"

#include "kolmocouple/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace kolmocouple {

GridDensity::GridDensity(SupportBox box, std::vector<int> resolution,
                         std::vector<double> values, double mass_tolerance)
    : box_(std::move(box)), resolution_(std::move(resolution)), values_(std::move(values)) {
    if (!box_.finite()) throw InvalidParameterError("GridDensity: box must be finite");
    if (static_cast<int>(resolution_.size()) != box_.dim())
        throw InvalidParameterError("GridDensity: resolution rank != box dimension");
    std::size_t n = 1;
    cell_volume_ = 1.0;
    widths_.resize(resolution_.size());
    for (std::size_t a = 0; a < resolution_.size(); ++a) {
        if (resolution_[a] < 1)
            throw InvalidParameterError("GridDensity: resolution must be >= 1");
        widths_[a] = (box_.hi[a] - box_.lo[a]) / resolution_[a];
        if (!(widths_[a] > 0))
            throw InvalidParameterError("GridDensity: box must have positive extent");
        cell_volume_ *= widths_[a];
        n *= static_cast<std::size_t>(resolution_[a]);
    }
    if (values_.size() != n)
        throw InvalidParameterError("GridDensity: value count does not match grid");
    for (double v : values_)
        if (!(v >= 0.0))
            throw InvalidParameterError("GridDensity: values must be nonnegative");
    const double m = mass();
    if (std::fabs(m - 1.0) > mass_tolerance)
        throw InvalidParameterError("GridDensity: mass " + std::to_string(m) +
                                    " deviates from 1 beyond tolerance");
}

Vec GridDensity::cell_center(std::size_t flat) const {
    Vec x(dim());
    for (int a = 0; a < dim(); ++a) {
        const std::size_t i = flat % resolution_[a];
        flat /= resolution_[a];
        x[a] = box_.lo[a] + (static_cast<double>(i) + 0.5) * widths_[a];
    }
    return x;
}

std::size_t GridDensity::flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = dim() - 1; a >= 0; --a)
        f = f * static_cast<std::size_t>(resolution_[a]) + static_cast<std::size_t>(idx[a]);
    return f;
}

double GridDensity::mass() const {
    std::vector<double> tmp(values_);
    return pairwise_sum(tmp) * cell_volume_;
}

double GridDensity::value_at(const Vec& x) const {
    const int d = dim();
    std::vector<std::size_t> base(d);
    std::vector<double> w(d);
    for (int a = 0; a < d; ++a) {
        const double t = (x[a] - box_.lo[a]) / widths_[a] - 0.5;
        if (t <= 0.0 || resolution_[a] == 1) {
            base[a] = 0;
            w[a] = 0.0;
        } else if (t >= resolution_[a] - 1) {
            base[a] = static_cast<std::size_t>(resolution_[a] - 2);
            w[a] = 1.0;
        } else {
            base[a] = static_cast<std::size_t>(t);
            w[a] = t - static_cast<double>(base[a]);
        }
    }
    double acc = 0.0;
    for (int c = 0; c < (1 << d); ++c) {
        double cw = 1.0;
        std::size_t flat = 0;
        for (int a = d - 1; a >= 0; --a) {
            const bool hi = (c >> a) & 1;
            std::size_t i = base[a];
            if (resolution_[a] == 1) {
                if (hi) cw = 0.0;
            } else {
                i += hi ? 1 : 0;
                cw *= hi ? w[a] : 1.0 - w[a];
            }
            flat = flat * static_cast<std::size_t>(resolution_[a]) + i;
        }
        if (cw != 0.0) acc += cw * values_[flat];
    }
    return acc;
}

void GridDensity::write_csv(std::ostream& out) const {
    out.precision(17);
    out << "# dim," << dim() << "\n# lo";
    for (int a = 0; a < dim(); ++a) out << ',' << box_.lo[a];
    out << "\n# hi";
    for (int a = 0; a < dim(); ++a) out << ',' << box_.hi[a];
    out << "\n# resolution";
    for (int a = 0; a < dim(); ++a) out << ',' << resolution_[a];
    out << '\n';
    for (int a = 0; a < dim(); ++a) out << 'i' << (a + 1) << ',';
    out << "value\n";
    std::vector<int> idx(dim(), 0);
    for (std::size_t f = 0; f < values_.size(); ++f) {
        for (int a = 0; a < dim(); ++a) out << idx[a] << ',';
        out << values_[f] << '\n';
        for (int a = 0; a < dim(); ++a) {
            if (++idx[a] < resolution_[a]) break;
            idx[a] = 0;
        }
    }
}

namespace {
std::vector<std::string> split_line(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}
}  // namespace

GridDensity GridDensity::read_csv(std::istream& in, double mass_tolerance) {
    std::string line;
    int d = -1;
    Vec lo, hi;
    std::vector<int> res;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        const auto cells = split_line(line.substr(1));
        if (cells.empty()) continue;
        const std::string key = cells[0];
        if (key == "dim") {
            d = std::stoi(cells.at(1));
        } else if (key == "lo" || key == "hi" || key == "resolution") {
            if (d < 0) throw InvalidParameterError("grid csv: dim must come first");
            if (static_cast<int>(cells.size()) != d + 1)
                throw InvalidParameterError("grid csv: bad metadata arity for " + key);
            if (key == "resolution") {
                res.resize(d);
                for (int a = 0; a < d; ++a) res[a] = std::stoi(cells[a + 1]);
            } else {
                Vec& v = (key == "lo") ? lo : hi;
                v.resize(d);
                for (int a = 0; a < d; ++a) v[a] = std::stod(cells[a + 1]);
            }
        }
    }
    if (d < 0 || lo.size() != d || hi.size() != d || static_cast<int>(res.size()) != d)
        throw InvalidParameterError("grid csv: incomplete metadata header");
    // `line` currently holds the column header; data rows follow
    std::size_t n = 1;
    for (int r : res) n *= static_cast<std::size_t>(r);
    std::vector<double> values(n, 0.0);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_line(line);
        if (static_cast<int>(cells.size()) != d + 1)
            throw InvalidParameterError("grid csv: bad row arity");
        std::vector<int> idx(d);
        for (int a = 0; a < d; ++a) idx[a] = std::stoi(cells[a]);
        std::size_t flat = 0;
        for (int a = d - 1; a >= 0; --a)
            flat = flat * static_cast<std::size_t>(res[a]) + static_cast<std::size_t>(idx[a]);
        values.at(flat) = std::stod(cells[d]);
        ++rows;
    }
    if (rows != n) throw InvalidParameterError("grid csv: wrong number of data rows");
    return GridDensity({lo, hi}, res, std::move(values), mass_tolerance);
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<Vec> pts, std::vector<double> wts)
    : points(std::move(pts)), weights(std::move(wts)) {
    if (points.empty()) throw InvalidParameterError("EmpiricalMeasure: needs N >= 1");
    if (points.size() != weights.size())
        throw InvalidParameterError("EmpiricalMeasure: point/weight count mismatch");
    double total = pairwise_sum(weights);
    for (double w : weights)
        if (!(w >= 0.0))
            throw InvalidParameterError("EmpiricalMeasure: weights must be nonnegative");
    if (std::fabs(total - 1.0) > 1e-12)
        throw InvalidParameterError("EmpiricalMeasure: weights sum to " +
                                    std::to_string(total) + ", expected 1");
}

void EmpiricalMeasure::write_csv(std::ostream& out) const {
    out.precision(17);
    for (int a = 0; a < dim(); ++a) out << 'x' << (a + 1) << ',';
    out << "weight\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (int a = 0; a < dim(); ++a) out << points[i][a] << ',';
        out << weights[i] << '\n';
    }
}

EmpiricalMeasure EmpiricalMeasure::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidParameterError("empirical csv: empty");
    const auto header = split_line(line);
    const int d = static_cast<int>(header.size()) - 1;
    if (d < 1 || header.back() != "weight")
        throw InvalidParameterError("empirical csv: header must be x1..xd,weight");
    std::vector<Vec> pts;
    std::vector<double> wts;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_line(line);
        if (static_cast<int>(cells.size()) != d + 1)
            throw InvalidParameterError("empirical csv: bad row arity");
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = std::stod(cells[a]);
        pts.push_back(x);
        wts.push_back(std::stod(cells[d]));
    }
    return EmpiricalMeasure(std::move(pts), std::move(wts));
}

double AnalyticDensity::density(const Vec& x) const {
    if (kind == Kind::example1_radial) {
        const double r2 = x.squaredNorm();
        if (r2 == 0.0) return 0.0;  // integrable singularity; value unused at a point
        return normalizer / r2 * std::exp(-0.5 * r2);
    }
    double e = 0.0;
    for (int a = 0; a < d; ++a) {
        const double z = x[a] - mean[a];
        e += z * z / variance_diag[a];
    }
    return normalizer * std::exp(-0.5 * e);
}

AnalyticDensity gaussian_density(Vec mean, Vec variance_diag) {
    if (mean.size() != variance_diag.size())
        throw InvalidParameterError("gaussian_density: mean/variance rank mismatch");
    for (int a = 0; a < variance_diag.size(); ++a)
        if (!(variance_diag[a] > 0))
            throw InvalidParameterError("gaussian_density: variance must be > 0");
    AnalyticDensity g;
    g.kind = AnalyticDensity::Kind::gaussian;
    g.d = static_cast<int>(mean.size());
    g.mean = std::move(mean);
    g.variance_diag = std::move(variance_diag);
    double det = 1.0;
    for (int a = 0; a < g.d; ++a) det *= g.variance_diag[a];
    g.normalizer = std::pow(2.0 * M_PI, -0.5 * g.d) / std::sqrt(det);
    return g;
}

AnalyticDensity example1_density(int d) {
    if (d != 3)
        throw InvalidParameterError(
            "example1_density: only d = 3 is supported, got d = " + std::to_string(d));
    AnalyticDensity a;
    a.kind = AnalyticDensity::Kind::example1_radial;
    a.d = 3;
    a.mean = Vec::Zero(3);
    a.variance_diag = Vec::Ones(3);
    // 4 pi C \int_0^inf exp(-r^2/2) dr = 1
    const double radial =
        integrate_1d([](double r) { return std::exp(-0.5 * r * r); }, 0.0, 40.0);
    a.normalizer = 1.0 / (4.0 * M_PI * radial);
    return a;
}

int measure_dim(const MeasureRep& m) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GridDensity>) return v.dim();
            else if constexpr (std::is_same_v<T, EmpiricalMeasure>) return v.dim();
            else if constexpr (std::is_same_v<T, AnalyticDensity>) return v.d;
            else return v.dim();
        },
        m);
}

namespace {

double integrate_grid(const GridDensity& g, const FnNd& f, const SupportBox& support) {
    // index window of cells whose centers can lie in the support
    const int d = g.dim();
    std::vector<int> lo_idx(d), hi_idx(d);
    for (int a = 0; a < d; ++a) {
        const double w = g.cell_width(a);
        const double lo = std::max(support.lo[a], g.box().lo[a]);
        const double hi = std::min(support.hi[a], g.box().hi[a]);
        if (lo > hi) return 0.0;
        lo_idx[a] = std::clamp(
            static_cast<int>(std::floor((lo - g.box().lo[a]) / w - 0.5)), 0,
            g.resolution()[a] - 1);
        hi_idx[a] = std::clamp(
            static_cast<int>(std::ceil((hi - g.box().lo[a]) / w - 0.5)), 0,
            g.resolution()[a] - 1);
    }
    std::vector<int> idx(lo_idx);
    std::vector<double> terms;
    for (;;) {
        const std::size_t flat = g.flat_index(idx);
        const double v = g.values()[flat];
        if (v != 0.0) {
            const Vec c = g.cell_center(flat);
            terms.push_back(f(c) * v);
        }
        int a = 0;
        for (; a < d; ++a) {
            if (++idx[a] <= hi_idx[a]) break;
            idx[a] = lo_idx[a];
        }
        if (a == d) break;
    }
    return pairwise_sum(terms) * g.cell_volume();
}

double integrate_analytic(const AnalyticDensity& m, const FnNd& f,
                          const SupportBox& support) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-8;
    if (m.kind == AnalyticDensity::Kind::example1_radial) {
        // int f dmu = C int_0^rmax exp(-r^2/2) [ int_{S^2} f(r w) dS(w) ] dr:
        // the r^2 Jacobian cancels the |x|^{-2} singularity exactly.
        double rmax = 0.0;
        for (int a = 0; a < 3; ++a)
            rmax = std::max(rmax,
                            std::max(std::fabs(support.lo[a]), std::fabs(support.hi[a])));
        rmax = std::min(rmax * std::sqrt(3.0), 10.0);
        double prev = 0.0;
        bool have_prev = false;
        std::vector<double> u, w;
        for (int order = 8; order <= 128; order *= 2) {
            gauss_legendre(order, u, w);
            const int mphi = 2 * order;
            auto shell = [&](double r) {
                double s = 0.0;
                Vec p(3);
                for (int i = 0; i < order; ++i) {
                    const double st = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
                    double ring = 0.0;
                    for (int k = 0; k < mphi; ++k) {
                        const double phi = 2.0 * M_PI * k / mphi;
                        p[0] = r * st * std::cos(phi);
                        p[1] = r * st * std::sin(phi);
                        p[2] = r * u[i];
                        ring += f(p);
                    }
                    s += w[i] * ring * (2.0 * M_PI / mphi);
                }
                return s * std::exp(-0.5 * r * r);
            };
            const double cur = m.normalizer * integrate_1d(shell, 0.0, rmax, opt);
            if (have_prev && std::fabs(cur - prev) <= 1e-8 * std::fabs(cur) + 1e-12)
                return cur;
            prev = cur;
            have_prev = true;
        }
        return prev;
    }
    // gaussian: adaptive tensor quadrature over support intersected with the
    // 8.6-sigma box (tail mass < 1e-16 relative)
    Vec lo(m.d), hi(m.d);
    for (int a = 0; a < m.d; ++a) {
        const double s = 8.6 * std::sqrt(m.variance_diag[a]);
        lo[a] = std::max(support.lo[a], m.mean[a] - s);
        hi[a] = std::min(support.hi[a], m.mean[a] + s);
        if (lo[a] >= hi[a]) return 0.0;
    }
    return integrate_box([&](const Vec& x) { return f(x) * m.density(x); }, lo, hi, opt);
}

}  // namespace

double integrate(const MeasureRep& measure, const FnNd& f, const SupportBox& support) {
    if (!support.finite())
        throw InvalidParameterError("integrate: support box must be finite");
    if (support.dim() != measure_dim(measure))
        throw InvalidParameterError("integrate: support dimension mismatch");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GridDensity>) {
                return integrate_grid(m, f, support);
            } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
                std::vector<double> terms;
                terms.reserve(m.points.size());
                for (std::size_t i = 0; i < m.points.size(); ++i)
                    terms.push_back(
                        support.contains(m.points[i]) ? m.weights[i] * f(m.points[i]) : 0.0);
                return pairwise_sum(terms);
            } else if constexpr (std::is_same_v<T, AnalyticDensity>) {
                return integrate_analytic(m, f, support);
            } else {
                return f(m.atom);
            }
        },
        measure);
}

double l1_distance(const GridDensity& grid, const FnNd& reference_density) {
    std::vector<double> terms;
    terms.reserve(grid.cells());
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const Vec c = grid.cell_center(i);
        terms.push_back(std::fabs(grid.values()[i] - reference_density(c)));
    }
    return pairwise_sum(terms) * grid.cell_volume();
}

CouplingMeasure CouplingMeasure::product(MeasureRep mu, MeasureRep nu) {
    if (measure_dim(mu) != measure_dim(nu))
        throw InvalidParameterError("CouplingMeasure: factor dimensions differ");
    CouplingMeasure c;
    c.kind_ = Kind::product;
    c.factor_dim_ = measure_dim(mu);
    c.first_ = std::make_shared<MeasureRep>(std::move(mu));
    c.second_ = std::make_shared<MeasureRep>(std::move(nu));
    return c;
}

CouplingMeasure CouplingMeasure::diagonal(MeasureRep mu) {
    CouplingMeasure c;
    c.kind_ = Kind::diagonal;
    c.factor_dim_ = measure_dim(mu);
    c.first_ = std::make_shared<MeasureRep>(std::move(mu));
    return c;
}

CouplingMeasure CouplingMeasure::grid2d(GridDensity grid, int factor_dim) {
    if (grid.dim() != 2 * factor_dim)
        throw InvalidParameterError("CouplingMeasure: grid must live on R^{2d}");
    CouplingMeasure c;
    c.kind_ = Kind::grid2d;
    c.factor_dim_ = factor_dim;
    c.grid_ = std::make_shared<GridDensity>(std::move(grid));
    return c;
}

MeasureRep CouplingMeasure::project(Axis axis) const {
    switch (kind_) {
        case Kind::product:
            return axis == Axis::first ? *first_ : *second_;
        case Kind::diagonal:
            return *first_;
        case Kind::grid2d: {
            const GridDensity& g = *grid_;
            const int d = factor_dim_;
            const int off = (axis == Axis::first) ? 0 : d;
            const int other_off = d - off;
            SupportBox box{Vec(d), Vec(d)};
            std::vector<int> res(d);
            for (int a = 0; a < d; ++a) {
                box.lo[a] = g.box().lo[off + a];
                box.hi[a] = g.box().hi[off + a];
                res[a] = g.resolution()[off + a];
            }
            std::size_t cells = 1;
            for (int r : res) cells *= static_cast<std::size_t>(r);
            double other_vol = 1.0;
            for (int a = 0; a < d; ++a) other_vol *= g.cell_width(other_off + a);
            std::vector<double> marginal(cells, 0.0);
            std::vector<int> idx(2 * d, 0);
            for (std::size_t f = 0; f < g.cells(); ++f) {
                std::size_t keep = 0;
                for (int a = d - 1; a >= 0; --a)
                    keep = keep * static_cast<std::size_t>(g.resolution()[off + a]) +
                           static_cast<std::size_t>(idx[off + a]);
                marginal[keep] += g.values()[f] * other_vol;
                for (int a = 0; a < 2 * d; ++a) {
                    if (++idx[a] < g.resolution()[a]) break;
                    idx[a] = 0;
                }
            }
            return GridDensity(box, res, std::move(marginal), 1e-8);
        }
    }
    throw std::logic_error("CouplingMeasure::project: bad kind");
}

double CouplingMeasure::integrate(const FnNd& f, const SupportBox& support) const {
    const int d = factor_dim_;
    if (support.dim() != 2 * d)
        throw InvalidParameterError("CouplingMeasure::integrate: support must be on R^{2d}");
    switch (kind_) {
        case Kind::grid2d:
            return kolmocouple::integrate(MeasureRep(*grid_), f, support);
        case Kind::diagonal: {
            SupportBox diag_box{Vec(d), Vec(d)};
            for (int a = 0; a < d; ++a) {
                diag_box.lo[a] = std::max(support.lo[a], support.lo[d + a]);
                diag_box.hi[a] = std::min(support.hi[a], support.hi[d + a]);
                if (diag_box.lo[a] > diag_box.hi[a]) return 0.0;
            }
            return kolmocouple::integrate(
                *first_,
                [&](const Vec& x) {
                    Vec z(2 * d);
                    z.head(d) = x;
                    z.tail(d) = x;
                    return f(z);
                },
                diag_box);
        }
        case Kind::product: {
            SupportBox sx{support.lo.head(d), support.hi.head(d)};
            SupportBox sy{support.lo.tail(d), support.hi.tail(d)};
            return kolmocouple::integrate(
                *first_,
                [&](const Vec& x) {
                    return kolmocouple::integrate(
                        *second_,
                        [&](const Vec& y) {
                            Vec z(2 * d);
                            z.head(d) = x;
                            z.tail(d) = y;
                            return f(z);
                        },
                        sy);
                },
                sx);
        }
    }
    throw std::logic_error("CouplingMeasure::integrate: bad kind");
}

}  // namespace kolmocouple
