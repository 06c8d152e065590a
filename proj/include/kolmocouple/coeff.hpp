#pragma once

#include "kolmocouple/common.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kolmocouple {

/// A diffusion/drift coefficient pair: Sigma maps R^d to d x d1 matrices,
/// b maps R^d to R^d, and the diffusion matrix is A = Sigma Sigma^t.
/// Evaluators are pure; a field is safe to share across threads.
struct CoefficientField {
    int d = 0;
    int d1 = 0;
    std::function<Mat(const Vec&)> sigma_eval;
    std::function<Vec(const Vec&)> drift_eval;
    std::string label;

    Mat sigma(const Vec& x) const;
    Vec drift(const Vec& x) const;
    /// A(x) = Sigma(x) Sigma(x)^t, symmetrized by averaging with its transpose.
    Mat diffusion(const Vec& x) const;
};

enum class FieldFamily {
    power_law,
    ornstein_uhlenbeck,
    diagonal_map,
    tanh_1d,
    constant,
    tabulated,
};

struct FieldParams {
    FieldFamily family = FieldFamily::constant;
    int d = 1;
    double alpha = 2.0;                     // power_law exponent
    double lambda = 1.0;                    // OU drift rate; diagonal_map drift rate
    double sigma0 = 1.0;                    // OU / constant scalar noise level
    double scale = 1.0;                     // diagonal_map: sigma^kk(x) = scale * x_k
    std::optional<std::vector<double>> sigma_matrix;  // constant: row-major d x d1
    std::optional<std::vector<double>> drift_vector;  // constant: b0
    std::string table_csv;                  // tabulated: path to CSV
};

const char* family_name(FieldFamily family);
FieldFamily family_from_name(const std::string& name);

/// Build one of the built-in families. Throws InvalidParameterError naming
/// the offending parameter.
CoefficientField make_builtin(const FieldParams& params);

/// A(x) = Sigma(x) Sigma(x)^t at x (alias for CoefficientField::diffusion,
/// with finiteness checking).
Mat eval_diffusion(const CoefficientField& field, const Vec& x);

/// Tabulated field on a full tensor grid read from CSV with header
/// x1,...,xd,sigma_11,...,sigma_d_d1,b_1,...,b_d. Multilinear interpolation
/// inside the grid, boundary clamping outside.
CoefficientField load_tabulated(std::istream& csv, const std::string& label);
CoefficientField load_tabulated_file(const std::string& path, const std::string& label);

}  // namespace kolmocouple
