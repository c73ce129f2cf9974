#pragma once

#include <string>
#include <vector>

namespace fkdv {

/// Parameters of  u_t + lambda u u_x - eps^2 D^alpha u_x = 0  on [-L, L].
///
/// lambda reconciles the two conventions in circulation: 6 for the classical
/// "6 u u_x" normalization, 1 for "u u_x". lambda = 0 gives the purely
/// dispersive linear flow, useful as an exactly solvable check.
struct ModelParams {
    double alpha = 2.0;       // fractional Laplacian exponent, in [1, 2]
    double eps = 1.0;         // dispersion coefficient, enters as eps^2
    double lambda = 1.0;      // nonlinearity coefficient
    double half_length = 3.141592653589793238462643383279502884; // L
};

inline std::vector<std::string> validate(const ModelParams& p) {
    std::vector<std::string> issues;
    if (!(p.alpha >= 1.0 && p.alpha <= 2.0))
        issues.push_back("alpha must lie in [1, 2], got " + std::to_string(p.alpha));
    if (!(p.eps > 0.0)) issues.push_back("eps must be positive, got " + std::to_string(p.eps));
    if (!(p.lambda >= 0.0))
        issues.push_back("lambda must be nonnegative, got " + std::to_string(p.lambda));
    if (!(p.half_length > 0.0))
        issues.push_back("half_length must be positive, got " + std::to_string(p.half_length));
    return issues;
}

} // namespace fkdv
