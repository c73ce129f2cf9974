#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"

namespace fkdv {

// ---------------------------------------------------------------------------
// Traveling-wave references
// ---------------------------------------------------------------------------

/// One-soliton of u_t + u u_x + u_xxx = 0: amplitude 9, speed 3.
/// Width sqrt(3)/2 follows from amplitude = 12 B^2 and speed = 4 B^2.
inline double kdv_one_soliton(double x, double t) {
    const double th = std::tanh(0.5 * std::sqrt(3.0) * (x - 3.0 * t));
    return 9.0 * (1.0 - th * th);
}

/// Periodic one-soliton of the Benjamin-Ono equation on [-L, L], speed c.
/// Amplitude factor 2 c delta^2 (the delta^2 is what makes the wave satisfy
/// u_t + u u_x - D^1 u_x = 0; the residual test pins it).
inline double bo_soliton(double x, double t, double c, double half_length) {
    const double delta = std::numbers::pi / (c * half_length);
    if (!(delta <= 1.0))
        throw ParameterError("bo_soliton: need c*L >= pi (delta <= 1), got delta = " +
                             std::to_string(delta));
    const double b = std::sqrt(1.0 - delta * delta);
    return 2.0 * c * delta * delta / (1.0 - b * std::cos(c * delta * (x - c * t)));
}

// ---------------------------------------------------------------------------
// Numerical derivatives of callables (fourth-order centered stencils)
// ---------------------------------------------------------------------------

namespace detail {

using RealFn = std::function<double(double)>;

inline double fd1(const RealFn& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline double fd2(const RealFn& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
           (12 * h * h);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Gradient catastrophe of the Hopf equation u_t + lambda u u_x = 0
// ---------------------------------------------------------------------------

/// Break time, location, and value at the first characteristic crossing.
struct BreakPoint {
    double t_c;
    double x_c;
    double u_c;
};

/// t_c = 1 / max_x(-lambda u0'(x)), located by a dense scan followed by
/// bisection on the derivative of the objective (a root is located far more
/// sharply than an extremum under finite-difference noise).
inline BreakPoint break_point(const detail::RealFn& u0, double lambda, double x_lo = -10.0,
                              double x_hi = 10.0, int n_scan = 100001) {
    if (!(lambda > 0.0)) throw ParameterError("break_point: lambda must be positive");
    const double h = 1e-3 * std::max(1.0, (x_hi - x_lo) / 20.0);
    auto slope = [&](double x) { return -lambda * detail::fd1(u0, x, h); };

    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    const double dx = (x_hi - x_lo) / (n_scan - 1);
    for (int i = 0; i < n_scan; ++i) {
        const double v = slope(x_lo + i * dx);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!(best_val > 0.0))
        throw NoBreakingError("break_point: initial datum has no negative slope");

    // Refine the argmax as the root of d(slope)/dx inside the bracketing cell.
    auto dslope = [&](double x) { return -lambda * detail::fd2(u0, x, h); };
    double a = x_lo + std::max(0, best - 1) * dx;
    double b = x_lo + std::min(n_scan - 1, best + 1) * dx;
    double fa = dslope(a), fb = dslope(b);
    double xi = x_lo + best * dx;
    if (fa > 0.0 && fb < 0.0) {
        for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const double fm = dslope(m);
            (fm > 0.0 ? a : b) = m;
        }
        xi = 0.5 * (a + b);
    }

    const double g = slope(xi);
    if (!(g > 0.0)) throw NoBreakingError("break_point: refined slope is not positive");
    BreakPoint bp;
    bp.t_c = 1.0 / g;
    bp.u_c = u0(xi);
    bp.x_c = xi + lambda * bp.t_c * bp.u_c;
    return bp;
}

// ---------------------------------------------------------------------------
// Hopf characteristic solution (pre-breaking)
// ---------------------------------------------------------------------------

/// Evaluator for u(x, t) = u0(xi) with x = lambda t u0(xi) + xi, valid for
/// t < t_c. Precomputes the break point and the datum's range once.
class HopfSolution {
  public:
    HopfSolution(detail::RealFn u0, double lambda, double x_lo = -10.0, double x_hi = 10.0)
        : u0_(std::move(u0)), lambda_(lambda) {
        try {
            break_ = break_point(u0_, lambda_, x_lo, x_hi);
        } catch (const NoBreakingError&) {
            break_ = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
        }
        u_min_ = std::numeric_limits<double>::infinity();
        u_max_ = -u_min_;
        const int n = 20001;
        for (int i = 0; i < n; ++i) {
            const double v = u0_(x_lo + (x_hi - x_lo) * i / (n - 1));
            u_min_ = std::min(u_min_, v);
            u_max_ = std::max(u_max_, v);
        }
    }

    double break_time() const { return break_.t_c; }
    const BreakPoint& break_point_data() const { return break_; }

    double operator()(double x, double t) const {
        if (t < 0.0) throw DomainError("HopfSolution: negative time");
        if (t >= break_.t_c)
            throw MultivaluedError("HopfSolution: t = " + std::to_string(t) +
                                   " is at or past the break time t_c = " +
                                   std::to_string(break_.t_c));
        if (t == 0.0) return u0_(x);

        // Unique root of g(xi) = xi + lambda t u0(xi) - x; g is strictly
        // increasing for t < t_c. Bracket from the datum's range, then
        // safeguarded Newton with bisection fallback.
        auto g = [&](double xi) { return xi + lambda_ * t * u0_(xi) - x; };
        double a = x - lambda_ * t * u_max_;
        double b = x - lambda_ * t * u_min_;
        if (a > b) std::swap(a, b);
        a -= 1e-9;
        b += 1e-9;
        double ga = g(a), gb = g(b);
        for (int widen = 0; widen < 60 && ga * gb > 0.0; ++widen) {
            const double w = b - a;
            a -= w;
            b += w;
            ga = g(a);
            gb = g(b);
        }
        if (ga * gb > 0.0) throw RootFindError("HopfSolution: failed to bracket the root");

        double xi = 0.5 * (a + b);
        const double tol = 1e-13 * std::max(1.0, std::abs(x));
        const double h = 1e-5;
        for (int it = 0; it < 200; ++it) {
            const double gx = g(xi);
            if (std::abs(gx) <= tol) break;
            (gx > 0.0 ? b : a) = xi;
            const double d = 1.0 + lambda_ * t * detail::fd1(u0_, xi, h);
            double next = (d != 0.0) ? xi - gx / d : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            xi = next;
        }
        if (std::abs(g(xi)) > 1e-12 * std::max(1.0, std::abs(x)))
            throw RootFindError("HopfSolution: residual " + std::to_string(std::abs(g(xi))) +
                                " above tolerance at x = " + std::to_string(x));
        return u0_(xi);
    }

  private:
    detail::RealFn u0_;
    double lambda_;
    BreakPoint break_;
    double u_min_, u_max_;
};

/// One-off evaluation; prefer HopfSolution for bulk queries.
inline double hopf_solution(const detail::RealFn& u0, double x, double t, double lambda) {
    return HopfSolution(u0, lambda)(x, t);
}

// ---------------------------------------------------------------------------
// Complete elliptic integrals and the Jacobi theta function
// ---------------------------------------------------------------------------

/// K(s), E(s), and the lattice parameter tau = i K'(s)/K(s).
struct EllipticData {
    double s;
    double K;
    double E;
    std::complex<double> tau;
};

namespace detail {

/// Arithmetic-geometric mean evaluation of K and E.
inline void agm_ke(double s, double& K, double& E) {
    double a = 1.0, b = std::sqrt(1.0 - s * s), c = s;
    double csum = 0.5 * c * c; // 2^{n-1} c_n^2 accumulator, n = 0 term
    double pow2 = 0.5;
    for (int n = 1; n < 64 && std::abs(c) > 1e-17 * a; ++n) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        csum += pow2 * c * c;
    }
    K = std::numbers::pi / (2.0 * a);
    E = K * (1.0 - csum);
}

} // namespace detail

inline EllipticData elliptic_KE(double s) {
    if (!(s >= 0.0 && s < 1.0))
        throw ParameterError("elliptic_KE: modulus must satisfy 0 <= s < 1, got " +
                             std::to_string(s));
    EllipticData d;
    d.s = s;
    detail::agm_ke(s, d.K, d.E);
    double Kc, Ec;
    detail::agm_ke(std::sqrt(std::max(0.0, 1.0 - s * s)), Kc, Ec);
    d.tau = std::complex<double>(0.0, Kc / d.K);
    return d;
}

/// Theta series mu(xi; tau) = sum_n exp(pi i n^2 tau + 2 pi i n xi),
/// summed in symmetric +-n pairs until the term magnitude drops below 1e-16.
inline double jacobi_theta3(double xi, std::complex<double> tau) {
    if (!(tau.imag() > 0.0))
        throw DivergentSeriesError("jacobi_theta3: need Im(tau) > 0 for convergence");
    const std::complex<double> ipi(0.0, std::numbers::pi);
    std::complex<double> sum = 1.0;
    for (long n = 1; n < 100000000L; ++n) {
        const std::complex<double> base = std::exp(ipi * (double(n) * double(n)) * tau);
        if (std::abs(base) < 1e-16) break;
        const double phase = 2.0 * std::numbers::pi * n * xi;
        sum += base * (2.0 * std::cos(phase));
    }
    return sum.real();
}

// ---------------------------------------------------------------------------
// Whitham branch points and the elliptic asymptotic solution
// ---------------------------------------------------------------------------

/// Ordered branch points beta1 >= beta2 >= beta3 of the local oscillation.
struct BetaTriple {
    double beta1;
    double beta2;
    double beta3;
};

inline void validate_ordering(const BetaTriple& b) {
    if (!(b.beta1 >= b.beta2 && b.beta2 >= b.beta3))
        throw ParameterError("BetaTriple: need beta1 >= beta2 >= beta3");
    if (!(b.beta1 > b.beta3)) throw ParameterError("BetaTriple: need beta1 > beta3 strictly");
}

/// Elliptic modulus s^2 = (beta2 - beta3) / (beta1 - beta3).
inline double elliptic_modulus(const BetaTriple& b) {
    validate_ordering(b);
    return std::sqrt((b.beta2 - b.beta3) / (b.beta1 - b.beta3));
}

/// Weak limit u~ = beta1 + beta2 + beta3 + 2 beta_bar with
/// beta_bar = -beta1 + (beta1 - beta3) E(s)/K(s). The degenerate face
/// beta2 = beta1 (s -> 1) uses the limit E/K -> 0.
inline double weak_limit(const BetaTriple& b) {
    const double s = elliptic_modulus(b);
    double ek; // E(s)/K(s)
    if (s >= 1.0 - 1e-12) {
        ek = 0.0;
    } else {
        const auto d = elliptic_KE(s);
        ek = d.E / d.K;
    }
    const double beta_bar = -b.beta1 + (b.beta1 - b.beta3) * ek;
    return b.beta1 + b.beta2 + b.beta3 + 2.0 * beta_bar;
}

/// Oscillatory-zone asymptotic solution
///   u ~ u~ + 2 eps^2 d^2/dx^2 log mu(theta_arg(x); tau),
/// with theta_arg = sqrt(beta1-beta3)/(2 eps K(s)) [x - 2t(b1+b2+b3) - q],
/// beta frozen in x. The second derivative is a centered difference with
/// step 1e-3 eps (the argument varies on scale eps).
inline double elliptic_asymptotic_u(double x, double t, double eps, const BetaTriple& b,
                                    double q) {
    if (!(eps > 0.0)) throw ParameterError("elliptic_asymptotic_u: eps must be positive");
    validate_ordering(b);
    if (!(b.beta1 > b.beta2 && b.beta2 > b.beta3))
        throw ParameterError("elliptic_asymptotic_u: need strict ordering");
    const double s = elliptic_modulus(b);
    const auto d = elliptic_KE(s);
    const double scale = std::sqrt(b.beta1 - b.beta3) / (2.0 * eps * d.K);
    auto logmu = [&](double xx) {
        const double arg = scale * (xx - 2.0 * t * (b.beta1 + b.beta2 + b.beta3) - q);
        return std::log(jacobi_theta3(arg, d.tau));
    };
    const double h = 1e-3 * eps;
    const double d2 = (logmu(x + h) - 2.0 * logmu(x) + logmu(x - h)) / (h * h);
    return weak_limit(b) + 2.0 * eps * eps * d2;
}

// ---------------------------------------------------------------------------
// Phase q of the elliptic solution (double quadrature)
// ---------------------------------------------------------------------------

namespace detail {

/// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<size_t>(n));
    weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)] = 0.5 * (1.0 - x); // map [-1,1] -> [0,1], reversed
        weights[static_cast<size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace detail

/// q(beta) = (1/(2 sqrt(2) pi)) * double integral of f_-(A) against the
/// weights (1-theta)^{-1/2} (1-gamma^2)^{-1/2} over [-1,1]^2, with
///   A = (1+theta)/2 [ (1+gamma)/2 b1 + (1-gamma)/2 b2 ] + (1-theta)/2 b3.
/// theta is substituted as 1 - 2v^2 (Jacobi weight absorbed exactly) and
/// integrated by Gauss-Legendre; gamma by Gauss-Chebyshev. 64 nodes each.
inline double q_phase(const BetaTriple& b, const detail::RealFn& f_minus, int n_nodes = 64) {
    validate_ordering(b);
    std::vector<double> vn, vw;
    detail::gauss_legendre_01(n_nodes, vn, vw);

    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double v = vn[static_cast<size_t>(i)];
        const double theta = 1.0 - 2.0 * v * v;
        double inner = 0.0;
        for (int j = 0; j < n_nodes; ++j) {
            const double gamma =
                std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n_nodes));
            const double A = 0.5 * (1.0 + theta) * (0.5 * (1.0 + gamma) * b.beta1 +
                                                    0.5 * (1.0 - gamma) * b.beta2) +
                             0.5 * (1.0 - theta) * b.beta3;
            inner += f_minus(A);
        }
        acc += vw[static_cast<size_t>(i)] * inner / n_nodes;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Externally supplied Whitham branch points (CSV profile)
// ---------------------------------------------------------------------------

/// Columns x, beta1, beta2, beta3 with a mandatory header row. Evaluation
/// interpolates linearly; querying outside the tabulated range is an error.
class BetaProfile {
  public:
    static BetaProfile load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("BetaProfile: cannot open " + path);
        std::string line;
        if (!std::getline(in, line)) throw ConfigError("BetaProfile: empty file " + path);
        if (parse_header(line) != std::vector<std::string>{"x", "beta1", "beta2", "beta3"})
            throw ConfigError("BetaProfile: expected header 'x,beta1,beta2,beta3' in " + path);

        BetaProfile prof;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string cell;
            std::vector<double> row;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            if (row.size() != 4)
                throw ConfigError("BetaProfile: line " + std::to_string(line_no) + " of " +
                                  path + " has " + std::to_string(row.size()) + " columns");
            prof.xs_.push_back(row[0]);
            prof.b1_.push_back(row[1]);
            prof.b2_.push_back(row[2]);
            prof.b3_.push_back(row[3]);
        }
        if (prof.xs_.size() < 2) throw ConfigError("BetaProfile: need at least two rows");
        for (size_t i = 1; i < prof.xs_.size(); ++i)
            if (!(prof.xs_[i] > prof.xs_[i - 1]))
                throw ConfigError("BetaProfile: x column must be strictly increasing");
        return prof;
    }

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

    BetaTriple at(double x) const {
        if (x < xs_.front() || x > xs_.back())
            throw DomainError("BetaProfile: x = " + std::to_string(x) +
                              " outside tabulated range [" + std::to_string(xs_.front()) +
                              ", " + std::to_string(xs_.back()) + "]");
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const size_t hi = std::min(xs_.size() - 1,
                                   static_cast<size_t>(std::max<std::ptrdiff_t>(
                                       1, it - xs_.begin())));
        const size_t lo = hi - 1;
        const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
        auto lerp = [&](const std::vector<double>& v) {
            return (1.0 - w) * v[lo] + w * v[hi];
        };
        return {lerp(b1_), lerp(b2_), lerp(b3_)};
    }

  private:
    static std::vector<std::string> parse_header(std::string line) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> out;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t"));
            cell.erase(cell.find_last_not_of(" \t") + 1);
            out.push_back(cell);
        }
        return out;
    }

    std::vector<double> xs_, b1_, b2_, b3_;
};

} // namespace fkdv
