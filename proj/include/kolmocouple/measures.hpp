#pragma once

#include "kolmocouple/common.hpp"
#include "kolmocouple/quadrature.hpp"

#include <iosfwd>
#include <memory>
#include <variant>
#include <vector>

namespace kolmocouple {

/// Axis-aligned box declaring where a test function may be nonzero.
struct SupportBox {
    Vec lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool finite() const { return lo.allFinite() && hi.allFinite(); }
    bool contains(const Vec& x) const {
        for (int a = 0; a < dim(); ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }
    static SupportBox cube(int d, double radius) {
        return {Vec::Constant(d, -radius), Vec::Constant(d, radius)};
    }
    static SupportBox ball_bounds(const Vec& center, double radius) {
        return {center.array() - radius, center.array() + radius};
    }
};

/// Probability density sampled at the cell centers of a regular grid.
class GridDensity {
public:
    GridDensity(SupportBox box, std::vector<int> resolution,
                std::vector<double> values, double mass_tolerance = 1e-9);

    int dim() const { return box_.dim(); }
    const SupportBox& box() const { return box_; }
    const std::vector<int>& resolution() const { return resolution_; }
    const std::vector<double>& values() const { return values_; }
    double cell_volume() const { return cell_volume_; }
    double cell_width(int axis) const { return widths_[axis]; }
    std::size_t cells() const { return values_.size(); }

    Vec cell_center(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& idx) const;
    double mass() const;
    /// Density by multilinear interpolation between cell centers (clamped).
    double value_at(const Vec& x) const;

    void write_csv(std::ostream& out) const;
    static GridDensity read_csv(std::istream& in, double mass_tolerance = 1e-9);

private:
    SupportBox box_;
    std::vector<int> resolution_;
    std::vector<double> values_;
    std::vector<double> widths_;
    double cell_volume_;
};

/// Weighted point cloud with weights summing to one.
struct EmpiricalMeasure {
    EmpiricalMeasure(std::vector<Vec> pts, std::vector<double> wts);

    std::vector<Vec> points;
    std::vector<double> weights;

    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }

    void write_csv(std::ostream& out) const;
    static EmpiricalMeasure read_csv(std::istream& in);
};

/// Closed-form densities with quadrature-backed normalizers. Gaussian
/// covariance is diagonal (all uses in this project are).
struct AnalyticDensity {
    enum class Kind { example1_radial, gaussian };

    Kind kind;
    int d = 1;
    Vec mean;
    Vec variance_diag;
    double normalizer = 1.0;

    double density(const Vec& x) const;
};

AnalyticDensity gaussian_density(Vec mean, Vec variance_diag);

/// The singular radial density normalizer * |x|^{-2} exp(-|x|^2/2) on R^3.
/// Only d = 3 is supported.
AnalyticDensity example1_density(int d = 3);

struct DiracMeasure {
    Vec atom;
    int dim() const { return static_cast<int>(atom.size()); }
};

using MeasureRep = std::variant<GridDensity, EmpiricalMeasure, AnalyticDensity, DiracMeasure>;

int measure_dim(const MeasureRep& m);

/// Integral of f (compactly supported inside `support`) against the measure.
/// Grid: midpoint rule on cells meeting the support. Empirical: weighted sum.
/// Dirac: point evaluation. Analytic: adaptive quadrature at relative
/// tolerance 1e-8 (spherical factorization for the radial kind).
double integrate(const MeasureRep& measure, const FnNd& f, const SupportBox& support);

/// L1 distance between a grid density and a reference density, midpoint rule.
double l1_distance(const GridDensity& grid, const FnNd& reference_density);

enum class Axis { first, second };

/// A measure on R^d x R^d: product of two marginals, the diagonal image of
/// one measure, or a raw 2d-dimensional grid density.
class CouplingMeasure {
public:
    enum class Kind { product, diagonal, grid2d };

    static CouplingMeasure product(MeasureRep mu, MeasureRep nu);
    static CouplingMeasure diagonal(MeasureRep mu);
    static CouplingMeasure grid2d(GridDensity grid, int factor_dim);

    Kind kind() const { return kind_; }
    int factor_dim() const { return factor_dim_; }
    const MeasureRep& first() const { return *first_; }
    const MeasureRep& second() const { return *second_; }
    const GridDensity& grid() const { return *grid_; }

    MeasureRep project(Axis axis) const;
    double integrate(const FnNd& f, const SupportBox& support) const;

private:
    Kind kind_ = Kind::diagonal;
    int factor_dim_ = 0;
    std::shared_ptr<const MeasureRep> first_, second_;
    std::shared_ptr<const GridDensity> grid_;
};

}  // namespace kolmocouple
