#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/model.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

/// Discretization parameters for the Crank-Nicolson Galerkin stepper.
struct SolverConfig {
    int n_modes = 64;          // N: retained band is |k| <= N
    double dt = 1e-3;          // time step
    double t_final = 1.0;      // T
    double fp_tolerance = 1e-12; // relative increment tolerance of the inner iteration
    int fp_max_iters = 100;    // cap on inner sweeps
    double zeta = 0.5;         // contraction target, in (0, 1)
    bool enforce_cfl = false;  // abort steps that violate the contraction bound

    /// eta = (8 - zeta) / (1 - zeta), always > 8 for zeta in (0, 1).
    double eta() const { return (8.0 - zeta) / (1.0 - zeta); }
};

inline std::vector<std::string> validate(const SolverConfig& c) {
    std::vector<std::string> issues;
    if (c.n_modes < 1) issues.push_back("n_modes must be >= 1, got " + std::to_string(c.n_modes));
    if (!(c.dt > 0.0)) issues.push_back("dt must be positive, got " + std::to_string(c.dt));
    if (!(c.t_final >= 0.0))
        issues.push_back("t_final must be nonnegative, got " + std::to_string(c.t_final));
    if (!(c.fp_tolerance > 0.0))
        issues.push_back("fp_tolerance must be positive, got " + std::to_string(c.fp_tolerance));
    if (c.fp_max_iters < 1)
        issues.push_back("fp_max_iters must be >= 1, got " + std::to_string(c.fp_max_iters));
    if (!(c.zeta > 0.0 && c.zeta < 1.0))
        issues.push_back("zeta must lie in (0, 1), got " + std::to_string(c.zeta));
    return issues;
}

/// Per-step record of the inner fixed-point iteration.
struct StepDiagnostics {
    int iterations = 0;            // sweeps performed
    double final_residual = 0.0;   // l2 norm of the last increment
    double contraction_ratio = 0.0; // max of consecutive residual ratios past the first sweep
    double l2_after = 0.0;         // coefficient l2 norm of the accepted state
    std::vector<double> residuals; // full increment history
};

/// Time history of a run: requested snapshots plus per-step diagnostics.
struct Trajectory {
    struct Snapshot {
        double time;
        SpectralField field;
    };
    std::vector<Snapshot> snapshots;
    std::vector<StepDiagnostics> step_diagnostics;

    const SpectralField& final_state() const { return snapshots.back().field; }
    double final_time() const { return snapshots.back().time; }
};

/// A step failed midway; carries whatever was integrated so far.
struct RunAborted : Error {
    Trajectory partial;
    RunAborted(const std::string& what, Trajectory traj)
        : Error(what), partial(std::move(traj)) {}
};

/// Galerkin form of lambda u u_x, computed as (lambda/2) d/dx of the
/// alias-free pointwise square. On the padded grid this equals the exact
/// truncated convolution (lambda/2) i kappa(m) sum_k u_hat(k) u_hat(m-k) on
/// every retained mode, which is what keeps the stepper L2-conservative.
inline SpectralField nonlinear_flux(const SpectralField& u, double lambda) {
    if (lambda == 0.0) return SpectralField(u.grid());
    SpectralField sq = product(u, u);
    sq = derivative_x(sq);
    for (auto& c : sq.coefficients()) c *= 0.5 * lambda;
    return sq;
}

/// Right-hand side of the coefficient ODE system:
/// d/dt u_hat = -flux_hat + eps^2 i kappa |kappa|^alpha u_hat.
inline SpectralField semi_discrete_rhs(const SpectralField& u, const ModelParams& p) {
    SpectralField rhs = nonlinear_flux(u, p.lambda);
    const auto& g = u.grid();
    const double eps2 = p.eps * p.eps;
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k) {
        const double kap = g.kappa(k);
        const double disp = eps2 * kap * std::pow(std::abs(kap), p.alpha);
        rhs.at(k) = -rhs.at(k) + std::complex<double>(0.0, disp) * u.at(k);
    }
    return rhs;
}

/// Largest dt for which the inner iteration is a guaranteed zeta-contraction:
/// lambda N dt <= zeta / (eta ||u||_{1+alpha}). Returns +infinity for fields
/// (or lambda) where the bound is vacuous.
inline double cfl_max_dt(const SpectralField& u, const ModelParams& p, const SolverConfig& c) {
    const double norm = sobolev_norm(u, 1.0 + p.alpha);
    if (norm == 0.0 || p.lambda == 0.0) return std::numeric_limits<double>::infinity();
    return c.zeta / (p.lambda * u.n_modes() * c.eta() * norm);
}

/// One Crank-Nicolson step of size dt (sign-free; negative dt runs the
/// reversible flow backwards). The implicit system is solved by the fixed
/// point iteration: each sweep evaluates the nonlinear term at the midpoint
/// (u_n + v)/2 and then inverts the linear dispersive part exactly per mode.
inline std::pair<SpectralField, StepDiagnostics> cn_step_dt(const SpectralField& u_n,
                                                            const ModelParams& p,
                                                            const SolverConfig& c, double dt) {
    const auto& g = u_n.grid();
    const int n = u_n.n_modes();
    const double eps2 = p.eps * p.eps;

    // (1 - i z/2) v_hat = (1 + i z/2) u_hat^n - dt flux_hat,  z = eps^2 dt kappa |kappa|^alpha
    std::vector<std::complex<double>> numer(static_cast<size_t>(2 * n + 1));
    std::vector<std::complex<double>> denom(static_cast<size_t>(2 * n + 1));
    for (int k = -n; k <= n; ++k) {
        const double kap = g.kappa(k);
        const double z = eps2 * dt * kap * std::pow(std::abs(kap), p.alpha);
        numer[static_cast<size_t>(k + n)] = u_n.at(k) * std::complex<double>(1.0, 0.5 * z);
        denom[static_cast<size_t>(k + n)] = std::complex<double>(1.0, -0.5 * z);
    }

    const double norm_un = l2_norm(u_n);
    StepDiagnostics diag;
    SpectralField v = u_n;
    bool converged = false;
    for (int sweep = 1; sweep <= c.fp_max_iters; ++sweep) {
        SpectralField mid = u_n;
        for (int k = -n; k <= n; ++k) mid.at(k) = 0.5 * (u_n.at(k) + v.at(k));
        const SpectralField flux = nonlinear_flux(mid, p.lambda);

        SpectralField v_next(g);
        for (int k = -n; k <= n; ++k)
            v_next.at(k) = (numer[static_cast<size_t>(k + n)] - dt * flux.at(k)) /
                           denom[static_cast<size_t>(k + n)];
        v_next.symmetrize();

        double incr = 0.0;
        for (int k = -n; k <= n; ++k) incr += std::norm(v_next.at(k) - v.at(k));
        incr = std::sqrt(incr);

        diag.residuals.push_back(incr);
        diag.iterations = sweep;
        v = std::move(v_next);
        if (incr <= c.fp_tolerance * norm_un) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw IterationDivergenceError(
            "cn_step: inner iteration did not converge within " +
                std::to_string(c.fp_max_iters) + " sweeps (last increment " +
                std::to_string(diag.residuals.back()) + ")",
            diag.residuals);

    diag.final_residual = diag.residuals.back();
    for (size_t i = 1; i < diag.residuals.size(); ++i)
        if (diag.residuals[i - 1] > 0.0)
            diag.contraction_ratio =
                std::max(diag.contraction_ratio, diag.residuals[i] / diag.residuals[i - 1]);
    diag.l2_after = l2_norm(v);
    return {std::move(v), std::move(diag)};
}

/// One step at the configured dt, with the optional contraction guard.
inline std::pair<SpectralField, StepDiagnostics> cn_step(const SpectralField& u_n,
                                                         const ModelParams& p,
                                                         const SolverConfig& c) {
    if (c.enforce_cfl) {
        const double dt_max = cfl_max_dt(u_n, p, c);
        if (c.dt > dt_max)
            throw StepSizeError("cn_step: dt = " + std::to_string(c.dt) +
                                " exceeds the contraction bound " + std::to_string(dt_max));
    }
    return cn_step_dt(u_n, p, c, c.dt);
}

/// Classical four-stage explicit step on the semi-discrete system. Used as a
/// cross-validation oracle for the implicit stepper, never in production runs.
/// The guard rejects steps outside the imaginary-axis stability region; pass
/// a looser bound only for single-step algebra checks on band-limited data.
inline SpectralField rk4_step(const SpectralField& u_n, const ModelParams& p, double dt,
                              double stability_guard = 2.8) {
    const auto& g = u_n.grid();
    const double kap_max = std::abs(g.kappa(u_n.n_modes()));
    const double stiff = p.eps * p.eps * std::pow(kap_max, 1.0 + p.alpha) * std::abs(dt);
    if (stiff > stability_guard)
        throw StepSizeError("rk4_step: |eps^2 kappa_max^{1+alpha} dt| = " +
                            std::to_string(stiff) + " exceeds the stability bound " +
                            std::to_string(stability_guard));

    auto axpy = [&](const SpectralField& base, double a, const SpectralField& d) {
        SpectralField out = base;
        for (int k = -u_n.n_modes(); k <= u_n.n_modes(); ++k) out.at(k) += a * d.at(k);
        return out;
    };
    const SpectralField k1 = semi_discrete_rhs(u_n, p);
    const SpectralField k2 = semi_discrete_rhs(axpy(u_n, 0.5 * dt, k1), p);
    const SpectralField k3 = semi_discrete_rhs(axpy(u_n, 0.5 * dt, k2), p);
    const SpectralField k4 = semi_discrete_rhs(axpy(u_n, dt, k3), p);

    SpectralField out = u_n;
    for (int k = -u_n.n_modes(); k <= u_n.n_modes(); ++k)
        out.at(k) += (dt / 6.0) * (k1.at(k) + 2.0 * k2.at(k) + 2.0 * k3.at(k) + k4.at(k));
    out.symmetrize();
    return out;
}

/// Collocation grid the solver uses for a given configuration.
inline PeriodicGrid solver_grid(const ModelParams& p, const SolverConfig& c) {
    return PeriodicGrid(c.n_modes, p.half_length);
}

namespace detail {

inline void throw_on_issues(const ModelParams& p, const SolverConfig& c) {
    auto issues = validate(p);
    const auto more = validate(c);
    issues.insert(issues.end(), more.begin(), more.end());
    if (!issues.empty()) {
        std::string msg = "invalid run parameters:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ParameterError(msg);
    }
}

} // namespace detail

/// Integrates from P_N u0 to t_final, recording each requested snapshot at
/// the nearest completed step. The final step is shortened to land exactly on
/// t_final. Step failures abort the run with the partial trajectory attached.
inline Trajectory run(std::span<const double> u0_samples, const ModelParams& p,
                      const SolverConfig& c, const std::vector<double>& snapshot_times = {}) {
    detail::throw_on_issues(p, c);
    for (double s : snapshot_times)
        if (s < 0.0 || s > c.t_final + 1e-12)
            throw ParameterError("snapshot time " + std::to_string(s) +
                                 " outside [0, t_final]");

    const PeriodicGrid grid = solver_grid(p, c);
    SpectralField u = analyze(u0_samples, grid);

    // Step times: t_n = n dt, with the last step shortened to hit T exactly.
    const double T = c.t_final;
    const auto n_full = static_cast<size_t>(std::floor(T / c.dt + 1e-9));
    std::vector<double> times(n_full + 1);
    for (size_t i = 0; i <= n_full; ++i) times[i] = static_cast<double>(i) * c.dt;
    if (T - times.back() > 1e-9 * c.dt)
        times.push_back(T);
    else
        times.back() = T;
    const size_t n_steps = times.size() - 1;

    // Map each requested snapshot to the nearest step index; always keep the end.
    std::set<size_t> marks{n_steps};
    for (double s : snapshot_times) {
        size_t best = 0;
        for (size_t i = 1; i < times.size(); ++i)
            if (std::abs(times[i] - s) < std::abs(times[best] - s)) best = i;
        marks.insert(best);
    }

    Trajectory traj;
    if (marks.count(0)) traj.snapshots.push_back({0.0, u});
    for (size_t nstep = 1; nstep <= n_steps; ++nstep) {
        const double dt_n = times[nstep] - times[nstep - 1];
        try {
            if (c.enforce_cfl) {
                const double dt_max = cfl_max_dt(u, p, c);
                if (dt_n > dt_max)
                    throw StepSizeError("run: dt = " + std::to_string(dt_n) +
                                        " exceeds the contraction bound " +
                                        std::to_string(dt_max) + " at t = " +
                                        std::to_string(times[nstep - 1]));
            }
            auto [u_next, diag] = cn_step_dt(u, p, c, dt_n);
            u = std::move(u_next);
            traj.step_diagnostics.push_back(std::move(diag));
        } catch (const Error& e) {
            throw RunAborted("run aborted at t = " + std::to_string(times[nstep - 1]) + ": " +
                                 e.what(),
                             std::move(traj));
        }
        if (marks.count(nstep)) traj.snapshots.push_back({times[nstep], u});
    }
    if (traj.snapshots.empty() || traj.snapshots.back().time != T)
        traj.snapshots.push_back({T, u});
    return traj;
}

/// Convenience overload: samples the initial datum on the solver grid.
inline Trajectory run(const std::function<double(double)>& u0, const ModelParams& p,
                      const SolverConfig& c, const std::vector<double>& snapshot_times = {}) {
    const PeriodicGrid grid = solver_grid(p, c);
    std::vector<double> samples(static_cast<size_t>(grid.n_points()));
    for (int j = 0; j < grid.n_points(); ++j) samples[static_cast<size_t>(j)] = u0(grid.point(j));
    return run(samples, p, c, snapshot_times);
}

} // namespace fkdv
