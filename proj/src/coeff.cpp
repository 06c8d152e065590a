#include "kolmocouple/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace kolmocouple {

Mat CoefficientField::sigma(const Vec& x) const {
    require_finite(x, "sigma");
    Mat s = sigma_eval(x);
    if (!s.allFinite())
        throw NumericalEvalError("sigma evaluation produced non-finite entries", x);
    return s;
}

Vec CoefficientField::drift(const Vec& x) const {
    require_finite(x, "drift");
    Vec b = drift_eval(x);
    if (!b.allFinite())
        throw NumericalEvalError("drift evaluation produced non-finite entries", x);
    return b;
}

Mat CoefficientField::diffusion(const Vec& x) const {
    const Mat s = sigma(x);
    Mat a = s * s.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    return a;
}

Mat eval_diffusion(const CoefficientField& field, const Vec& x) {
    return field.diffusion(x);
}

const char* family_name(FieldFamily family) {
    switch (family) {
        case FieldFamily::power_law: return "power_law";
        case FieldFamily::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
        case FieldFamily::diagonal_map: return "diagonal_map";
        case FieldFamily::tanh_1d: return "tanh_1d";
        case FieldFamily::constant: return "constant";
        case FieldFamily::tabulated: return "tabulated";
    }
    return "unknown";
}

FieldFamily family_from_name(const std::string& name) {
    if (name == "power_law") return FieldFamily::power_law;
    if (name == "ornstein_uhlenbeck") return FieldFamily::ornstein_uhlenbeck;
    if (name == "diagonal_map") return FieldFamily::diagonal_map;
    if (name == "tanh_1d") return FieldFamily::tanh_1d;
    if (name == "constant") return FieldFamily::constant;
    if (name == "tabulated") return FieldFamily::tabulated;
    throw InvalidParameterError("unknown field family '" + name + "'");
}

namespace {

CoefficientField make_power_law(const FieldParams& p) {
    if (p.d < 1) throw InvalidParameterError("power_law: d must be >= 1");
    if (!std::isfinite(p.alpha))
        throw InvalidParameterError("power_law: alpha must be finite");
    const int d = p.d;
    const double alpha = p.alpha;
    CoefficientField f;
    f.d = d;
    f.d1 = d;
    f.label = "power_law(d=" + std::to_string(d) + ",alpha=" + std::to_string(alpha) + ")";
    f.sigma_eval = [d, alpha](const Vec& x) -> Mat {
        const double r = x.norm();
        return std::pow(r, 0.5 * alpha) * Mat::Identity(d, d);
    };
    f.drift_eval = [alpha](const Vec& x) -> Vec {
        const double r = x.norm();
        return (-std::pow(r, alpha)) * x;
    };
    return f;
}

CoefficientField make_ou(const FieldParams& p) {
    if (p.d < 1) throw InvalidParameterError("ornstein_uhlenbeck: d must be >= 1");
    if (!(p.lambda > 0))
        throw InvalidParameterError("ornstein_uhlenbeck: lambda must be > 0");
    if (!(p.sigma0 >= 0))
        throw InvalidParameterError("ornstein_uhlenbeck: sigma0 must be >= 0");
    const int d = p.d;
    const double lambda = p.lambda;
    const double sigma0 = p.sigma0;
    CoefficientField f;
    f.d = d;
    f.d1 = d;
    f.label = "ou(d=" + std::to_string(d) + ",lambda=" + std::to_string(lambda) +
              ",sigma0=" + std::to_string(sigma0) + ")";
    f.sigma_eval = [d, sigma0](const Vec&) -> Mat { return sigma0 * Mat::Identity(d, d); };
    f.drift_eval = [lambda](const Vec& x) -> Vec { return -lambda * x; };
    return f;
}

CoefficientField make_diagonal_map(const FieldParams& p) {
    if (p.d < 1) throw InvalidParameterError("diagonal_map: d must be >= 1");
    if (!(p.scale > 0)) throw InvalidParameterError("diagonal_map: scale must be > 0");
    if (!(p.lambda >= 0))
        throw InvalidParameterError("diagonal_map: lambda must be >= 0");
    const int d = p.d;
    const double c = p.scale;
    const double lambda = p.lambda;
    CoefficientField f;
    f.d = d;
    f.d1 = d;
    f.label = "diagonal_map(d=" + std::to_string(d) + ",scale=" + std::to_string(c) + ")";
    // sigma^kk(x) = c * x_k: the coordinate map scaled by c, as a diagonal matrix
    f.sigma_eval = [d, c](const Vec& x) -> Mat {
        Mat s = Mat::Zero(d, d);
        for (int k = 0; k < d; ++k) s(k, k) = c * x[k];
        return s;
    };
    f.drift_eval = [lambda](const Vec& x) -> Vec { return -lambda * x; };
    return f;
}

CoefficientField make_tanh_1d(const FieldParams& p) {
    if (p.d != 1) throw InvalidParameterError("tanh_1d: d must be 1");
    CoefficientField f;
    f.d = 1;
    f.d1 = 1;
    f.label = "tanh_1d";
    f.sigma_eval = [](const Vec& x) -> Mat {
        Mat s(1, 1);
        s(0, 0) = std::tanh(x[0]);
        return s;
    };
    f.drift_eval = [](const Vec&) -> Vec { return Vec::Zero(1); };
    return f;
}

CoefficientField make_constant(const FieldParams& p) {
    if (p.d < 1) throw InvalidParameterError("constant: d must be >= 1");
    const int d = p.d;
    Mat sigma;
    if (p.sigma_matrix) {
        const auto& entries = *p.sigma_matrix;
        if (entries.size() % d != 0)
            throw InvalidParameterError(
                "constant: sigma_matrix size must be a multiple of d");
        const int d1 = static_cast<int>(entries.size()) / d;
        sigma.resize(d, d1);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d1; ++j) sigma(i, j) = entries[i * d1 + j];
    } else {
        if (!(p.sigma0 >= 0))
            throw InvalidParameterError("constant: sigma0 must be >= 0");
        sigma = p.sigma0 * Mat::Identity(d, d);
    }
    Vec b0 = Vec::Zero(d);
    if (p.drift_vector) {
        if (static_cast<int>(p.drift_vector->size()) != d)
            throw InvalidParameterError("constant: drift_vector size must equal d");
        for (int i = 0; i < d; ++i) b0[i] = (*p.drift_vector)[i];
    }
    CoefficientField f;
    f.d = d;
    f.d1 = static_cast<int>(sigma.cols());
    f.label = "constant(d=" + std::to_string(d) + ")";
    f.sigma_eval = [sigma](const Vec&) -> Mat { return sigma; };
    f.drift_eval = [b0](const Vec&) -> Vec { return b0; };
    return f;
}

// Full tensor grid with per-axis sorted coordinates; values interpolated
// multilinearly, clamped to the boundary outside the grid.
struct Table {
    int d = 0;
    int d1 = 0;
    std::vector<std::vector<double>> axes;  // sorted unique coordinates per axis
    // row-major over grid points (axis 0 fastest), then entry index
    std::vector<double> sigma_values;  // d*d1 entries per point
    std::vector<double> drift_values;  // d entries per point

    std::size_t points() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        std::size_t f = 0;
        for (int a = d - 1; a >= 0; --a) f = f * axes[a].size() + idx[a];
        return f;
    }

    // clamped cell location + interpolation weight along one axis
    void locate(int axis, double x, std::size_t& i0, double& w) const {
        const auto& ax = axes[axis];
        if (ax.size() == 1 || x <= ax.front()) {
            i0 = 0;
            w = 0.0;
            return;
        }
        if (x >= ax.back()) {
            i0 = ax.size() - 2;
            w = 1.0;
            return;
        }
        const auto it = std::upper_bound(ax.begin(), ax.end(), x);
        i0 = static_cast<std::size_t>(it - ax.begin()) - 1;
        w = (x - ax[i0]) / (ax[i0 + 1] - ax[i0]);
    }

    double interpolate(const std::vector<double>& values, int entries, int entry,
                       const Vec& x) const {
        std::vector<std::size_t> base(d);
        std::vector<double> weight(d);
        for (int a = 0; a < d; ++a) locate(a, x[a], base[a], weight[a]);
        double acc = 0.0;
        const int corners = 1 << d;
        std::vector<std::size_t> idx(d);
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            for (int a = 0; a < d; ++a) {
                const bool hi = (c >> a) & 1;
                if (axes[a].size() == 1) {
                    idx[a] = 0;
                    if (hi) w = 0.0;
                } else {
                    idx[a] = base[a] + (hi ? 1 : 0);
                    w *= hi ? weight[a] : 1.0 - weight[a];
                }
            }
            if (w == 0.0) continue;
            acc += w * values[flat_index(idx) * entries + entry];
        }
        return acc;
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        // trim
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

CoefficientField load_tabulated(std::istream& csv, const std::string& label) {
    std::string line;
    if (!std::getline(csv, line))
        throw InvalidParameterError("tabulated: empty CSV");
    const auto header = split_csv_line(line);
    int d = 0;
    while (d < static_cast<int>(header.size()) &&
           header[d] == "x" + std::to_string(d + 1))
        ++d;
    if (d == 0)
        throw InvalidParameterError("tabulated: header must start with x1,...,xd");
    int sigma_cols = 0;
    for (std::size_t i = d; i < header.size(); ++i)
        if (header[i].rfind("sigma_", 0) == 0) ++sigma_cols;
    if (sigma_cols == 0 || sigma_cols % d != 0)
        throw InvalidParameterError(
            "tabulated: expected d*d1 sigma_ij columns after the coordinates");
    const int d1 = sigma_cols / d;
    const int expected = d + sigma_cols + d;
    if (static_cast<int>(header.size()) != expected)
        throw InvalidParameterError("tabulated: expected " + std::to_string(expected) +
                                    " columns (x, sigma, b), got " +
                                    std::to_string(header.size()));

    std::vector<Vec> coords;
    std::vector<std::vector<double>> sigma_rows, drift_rows;
    while (std::getline(csv, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != expected)
            throw InvalidParameterError("tabulated: row with wrong column count");
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = std::stod(cells[a]);
        std::vector<double> srow(sigma_cols), brow(d);
        for (int k = 0; k < sigma_cols; ++k) srow[k] = std::stod(cells[d + k]);
        for (int k = 0; k < d; ++k) brow[k] = std::stod(cells[d + sigma_cols + k]);
        coords.push_back(x);
        sigma_rows.push_back(std::move(srow));
        drift_rows.push_back(std::move(brow));
    }
    if (coords.empty()) throw InvalidParameterError("tabulated: no data rows");

    auto table = std::make_shared<Table>();
    table->d = d;
    table->d1 = d1;
    table->axes.resize(d);
    for (int a = 0; a < d; ++a) {
        std::vector<double> ax;
        for (const auto& x : coords) ax.push_back(x[a]);
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
        table->axes[a] = std::move(ax);
    }
    if (table->points() != coords.size())
        throw InvalidParameterError(
            "tabulated: rows do not form a full tensor grid (" +
            std::to_string(coords.size()) + " rows, " +
            std::to_string(table->points()) + " grid points)");

    table->sigma_values.assign(table->points() * d * d1, 0.0);
    table->drift_values.assign(table->points() * d, 0.0);
    std::vector<char> seen(table->points(), 0);
    for (std::size_t r = 0; r < coords.size(); ++r) {
        std::vector<std::size_t> idx(d);
        for (int a = 0; a < d; ++a) {
            const auto& ax = table->axes[a];
            const auto it = std::lower_bound(ax.begin(), ax.end(), coords[r][a]);
            idx[a] = static_cast<std::size_t>(it - ax.begin());
        }
        const std::size_t f = table->flat_index(idx);
        if (seen[f]) throw InvalidParameterError("tabulated: duplicate grid point");
        seen[f] = 1;
        for (int k = 0; k < d * d1; ++k)
            table->sigma_values[f * d * d1 + k] = sigma_rows[r][k];
        for (int k = 0; k < d; ++k) table->drift_values[f * d + k] = drift_rows[r][k];
    }

    CoefficientField f;
    f.d = d;
    f.d1 = d1;
    f.label = label.empty() ? "tabulated" : label;
    f.sigma_eval = [table, d, d1](const Vec& x) -> Mat {
        Mat s(d, d1);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d1; ++j)
                s(i, j) = table->interpolate(table->sigma_values, d * d1, i * d1 + j, x);
        return s;
    };
    f.drift_eval = [table, d](const Vec& x) -> Vec {
        Vec b(d);
        for (int i = 0; i < d; ++i)
            b[i] = table->interpolate(table->drift_values, d, i, x);
        return b;
    };
    return f;
}

CoefficientField load_tabulated_file(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("tabulated: cannot open '" + path + "'");
    return load_tabulated(in, label.empty() ? path : label);
}

CoefficientField make_builtin(const FieldParams& params) {
    switch (params.family) {
        case FieldFamily::power_law: return make_power_law(params);
        case FieldFamily::ornstein_uhlenbeck: return make_ou(params);
        case FieldFamily::diagonal_map: return make_diagonal_map(params);
        case FieldFamily::tanh_1d: return make_tanh_1d(params);
        case FieldFamily::constant: return make_constant(params);
        case FieldFamily::tabulated:
            if (params.table_csv.empty())
                throw InvalidParameterError("tabulated: table_csv path is required");
            return load_tabulated_file(params.table_csv, "");
    }
    throw InvalidParameterError("make_builtin: unknown family");
}

}  // namespace kolmocouple
