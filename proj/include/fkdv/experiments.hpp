#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/field.hpp"
#include "fkdv/invariants.hpp"
#include "fkdv/model.hpp"
#include "fkdv/reference.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

// ---------------------------------------------------------------------------
// Rate formula and sup-norm error
// ---------------------------------------------------------------------------

/// R = (ln E(N1) - ln E(N2)) / (ln N2 - ln N1); positive when the error
/// decreases with resolution.
inline double rate(double e1, double e2, int n1, int n2) {
    if (!(e1 > 0.0 && e2 > 0.0)) throw DomainError("rate: errors must be positive");
    if (!(n2 > n1 && n1 > 0)) throw DomainError("rate: need n2 > n1 > 0");
    return (std::log(e1) - std::log(e2)) / (std::log(double(n2)) - std::log(double(n1)));
}

/// sup over collocation points in [a, b] of |u_num - u_ref|.
inline double sup_error(const SpectralField& u_num,
                        const std::function<double(double)>& u_ref, double a, double b) {
    const auto& g = u_num.grid();
    if (a > b || a < -g.half_length() - 1e-12 || b > g.half_length() + 1e-12)
        throw ParameterError("sup_error: window must sit inside [-L, L]");
    const auto s = synthesize(u_num);
    double m = 0.0;
    for (int j = 0; j < g.n_points(); ++j) {
        const double x = g.point(j);
        if (x < a || x > b) continue;
        m = std::max(m, std::abs(s[static_cast<size_t>(j)] - u_ref(x)));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// FKDV_NUM_THREADS caps every pool; zero or unset leaves the request as is.
inline int resolve_jobs(int requested) {
    int jobs = requested > 0 ? requested
                             : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("FKDV_NUM_THREADS")) {
        const int c = std::atoi(cap);
        if (c > 0) jobs = std::min(jobs, c);
    }
    return std::max(1, jobs);
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Exceptions must be
/// handled inside the body (each experiment row annotates its own failures).
inline void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    jobs = std::min(resolve_jobs(jobs), n);
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Named example setups
// ---------------------------------------------------------------------------

enum class ExampleId { Ex51, Ex52, Ex53 };

/// Everything a convergence run needs: the model, the datum, the horizon,
/// and (for the soliton examples) the closed-form solution to compare with.
struct ExampleSetup {
    std::string name;
    ModelParams params;
    std::function<double(double)> u0;
    double t_final;
    // Exact reference at t_final; absent for the self-referencing example.
    std::function<double(double)> exact;
    bool self_reference = false;
};

inline ExampleSetup example_setup(ExampleId id) {
    ExampleSetup s;
    switch (id) {
        case ExampleId::Ex51: {
            s.name = "example-5.1";
            s.params = {.alpha = 1.999, .eps = 1.0, .lambda = 1.0, .half_length = 15.0};
            s.t_final = 2.0;
            s.u0 = [](double x) { return kdv_one_soliton(x, 0.0); };
            s.exact = [T = s.t_final](double x) { return kdv_one_soliton(x, T); };
            break;
        }
        case ExampleId::Ex52: {
            s.name = "example-5.2";
            s.params = {.alpha = 1.01, .eps = 1.0, .lambda = 1.0, .half_length = 15.0};
            s.t_final = 20.0;
            const double c = 0.25, L = 15.0;
            s.u0 = [=](double x) { return bo_soliton(x, 0.0, c, L); };
            s.exact = [=, T = s.t_final](double x) { return bo_soliton(x, T, c, L); };
            break;
        }
        case ExampleId::Ex53: {
            s.name = "example-5.3";
            s.params = {.alpha = 1.5, .eps = 1.0, .lambda = 1.0,
                        .half_length = std::numbers::pi};
            s.t_final = 2.0;
            s.u0 = [](double x) { return 0.5 * std::sin(x); };
            s.self_reference = true;
            break;
        }
    }
    return s;
}

inline ExampleSetup example_setup(const std::string& name) {
    if (name == "example-5.1" || name == "5.1") return example_setup(ExampleId::Ex51);
    if (name == "example-5.2" || name == "5.2") return example_setup(ExampleId::Ex52);
    if (name == "example-5.3" || name == "5.3") return example_setup(ExampleId::Ex53);
    throw ConfigError("unknown example setup '" + name +
                      "' (expected example-5.1, example-5.2 or example-5.3)");
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    int n_modes = 0;
    double error = 0.0;
    std::optional<double> rate; // empty for the first row
    double i1 = 0.0, i2 = 0.0, i3 = 0.0;
    std::string note; // failure annotation; empty on success
};

struct StudyOptions {
    int self_ref_n = 0;      // 0: 8x the largest requested N
    int jobs = 0;            // 0: hardware concurrency (capped by FKDV_NUM_THREADS)
    double fp_tolerance = 1e-12;
};

namespace detail {

inline double sup_abs_samples(const std::function<double(double)>& f,
                              const PeriodicGrid& g) {
    double m = 0.0;
    for (int j = 0; j < g.n_points(); ++j) m = std::max(m, std::abs(f(g.point(j))));
    return m;
}

/// dt = 1 / (N ||u0||_inf), the step rule used throughout the studies.
inline double study_dt(int n_modes, double u0_inf) { return 1.0 / (n_modes * u0_inf); }

} // namespace detail

/// One solver run per requested N with dt = 1/(N ||u0||_inf); the error is
/// the physical L2 distance to the example's reference at t_final, and the
/// invariant columns are the normalized end-of-run values. Failures annotate
/// their row and leave the remaining rows intact.
inline std::vector<ConvergenceRow> convergence_study(const ExampleSetup& setup,
                                                     const std::vector<int>& n_list,
                                                     const StudyOptions& opt = {}) {
    if (n_list.empty()) return {};
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw ParameterError("convergence_study: n_list must be strictly increasing");

    const double u0_inf =
        detail::sup_abs_samples(setup.u0, PeriodicGrid(64, setup.params.half_length));

    auto solve = [&](int n) {
        SolverConfig c{.n_modes = n, .dt = detail::study_dt(n, u0_inf),
                       .t_final = setup.t_final, .fp_tolerance = opt.fp_tolerance};
        // Initial snapshot kept so the invariant columns normalize against t = 0.
        return run(setup.u0, setup.params, c, {0.0, setup.t_final});
    };

    // Self-referencing setups integrate one refined run first.
    std::optional<SpectralField> reference;
    if (setup.self_reference) {
        const int ref_n = opt.self_ref_n > 0 ? opt.self_ref_n : 8 * n_list.back();
        if (ref_n <= n_list.back())
            throw ParameterError("convergence_study: reference N must exceed the largest N");
        reference = solve(ref_n).final_state();
    }

    std::vector<ConvergenceRow> rows(n_list.size());
    parallel_for(static_cast<int>(n_list.size()), opt.jobs, [&](int i) {
        ConvergenceRow& row = rows[static_cast<size_t>(i)];
        row.n_modes = n_list[static_cast<size_t>(i)];
        try {
            const auto traj = solve(row.n_modes);
            const auto& u = traj.final_state();
            if (reference) {
                double s = 0.0;
                for (int k = -u.n_modes(); k <= u.n_modes(); ++k)
                    s += std::norm(u.at(k) - reference->at(k));
                row.error = std::sqrt(2.0 * setup.params.half_length * s);
            } else {
                // Physical L2 distance to the closed form, by quadrature on
                // the collocation grid.
                const auto s = synthesize(u);
                const auto& g = u.grid();
                double acc = 0.0;
                for (int j = 0; j < g.n_points(); ++j) {
                    const double d = s[static_cast<size_t>(j)] - setup.exact(g.point(j));
                    acc += d * d;
                }
                row.error = std::sqrt(acc * 2.0 * g.half_length() / g.n_points());
            }
            const auto rep = report(traj, setup.params);
            row.i1 = rep.series[0].back();
            row.i2 = rep.series[1].back();
            row.i3 = rep.series[2].back();
        } catch (const std::exception& e) {
            row.note = e.what();
        }
    });

    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].note.empty() && rows[i - 1].note.empty() && rows[i - 1].error > 0.0 &&
            rows[i].error > 0.0)
            rows[i].rate = rate(rows[i - 1].error, rows[i].error, rows[i - 1].n_modes,
                                rows[i].n_modes);
    return rows;
}

// ---------------------------------------------------------------------------
// Zero-dispersion sweep
// ---------------------------------------------------------------------------

struct EpsSweepRow {
    double eps = 0.0;
    double error = 0.0;
    double t_eval = 0.0;
    std::string reference_kind;
    std::string note;
};

/// Reference the sweep compares against: the pre-breaking characteristic
/// solution, an externally tabulated elliptic profile, or a caller-supplied
/// exact map (used by the linear sanity checks).
struct ZdlReference {
    enum class Kind { Hopf, EllipticFile, Exact } kind = Kind::Hopf;
    // EllipticFile:
    const BetaProfile* profile = nullptr;
    double q = 0.0;
    // Exact:
    std::function<double(double)> exact;

    static ZdlReference hopf() { return {}; }
    static ZdlReference elliptic(const BetaProfile& prof, double q_phase_value) {
        ZdlReference r;
        r.kind = Kind::EllipticFile;
        r.profile = &prof;
        r.q = q_phase_value;
        return r;
    }
    static ZdlReference exact_map(std::function<double(double)> f) {
        ZdlReference r;
        r.kind = Kind::Exact;
        r.exact = std::move(f);
        return r;
    }
};

struct SweepOptions {
    int n_modes = 1 << 12;
    int jobs = 0;
    double fp_tolerance = 1e-12;
    double window_lo = 0.0, window_hi = 0.0; // defaults to the full domain
    double dt_factor = 8.0;                  // dt = 1/(dt_factor N ||u0||_inf)
    double dt = 0.0;                         // nonzero: use this step instead of the rule
};

/// One solver run per eps at fixed N, dt = 1/(8 N ||u0||_inf); E(eps) is the
/// sup-norm distance to the reference on the window. With a Hopf reference
/// the evaluation time must lie before the break time; that is checked before
/// any run starts.
inline std::vector<EpsSweepRow> zdl_sweep(const std::function<double(double)>& u0,
                                          const ModelParams& p_base,
                                          const std::vector<double>& eps_list, double t_eval,
                                          const ZdlReference& reference,
                                          const SweepOptions& opt = {}) {
    const double L = p_base.half_length;
    const double lo = (opt.window_lo == 0.0 && opt.window_hi == 0.0) ? -L : opt.window_lo;
    const double hi = (opt.window_lo == 0.0 && opt.window_hi == 0.0) ? L : opt.window_hi;

    std::function<double(double)> ref_fn;
    std::string kind_name;
    std::optional<HopfSolution> hopf;
    switch (reference.kind) {
        case ZdlReference::Kind::Hopf: {
            kind_name = "hopf";
            hopf.emplace(u0, p_base.lambda, -L, L);
            if (t_eval >= hopf->break_time())
                throw MultivaluedError(
                    "zdl_sweep: t = " + std::to_string(t_eval) +
                    " is at or past the gradient catastrophe time t_c = " +
                    std::to_string(hopf->break_time()) + "; the Hopf reference is invalid");
            ref_fn = [&h = *hopf, t_eval](double x) { return h(x, t_eval); };
            break;
        }
        case ZdlReference::Kind::EllipticFile:
            kind_name = "elliptic-file";
            if (!reference.profile)
                throw ParameterError("zdl_sweep: elliptic reference needs a beta profile");
            break; // the reference depends on eps; built per row below

        case ZdlReference::Kind::Exact:
            kind_name = "exact";
            ref_fn = reference.exact;
            break;
    }

    const double u0_inf = detail::sup_abs_samples(u0, PeriodicGrid(64, L));

    std::vector<EpsSweepRow> rows(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), opt.jobs, [&](int i) {
        EpsSweepRow& row = rows[static_cast<size_t>(i)];
        row.eps = eps_list[static_cast<size_t>(i)];
        row.t_eval = t_eval;
        row.reference_kind = kind_name;
        try {
            ModelParams p = p_base;
            p.eps = row.eps;
            const double dt =
                opt.dt > 0.0 ? opt.dt : 1.0 / (opt.dt_factor * opt.n_modes * u0_inf);
            SolverConfig c{.n_modes = opt.n_modes, .dt = dt, .t_final = t_eval,
                           .fp_tolerance = opt.fp_tolerance};
            const auto u = run(u0, p, c).final_state();

            if (reference.kind == ZdlReference::Kind::EllipticFile) {
                const auto* prof = reference.profile;
                const double q = reference.q;
                const double eps = row.eps;
                auto elliptic = [&, q, eps](double x) {
                    return elliptic_asymptotic_u(x, t_eval, eps, prof->at(x), q);
                };
                row.error = sup_error(u, elliptic, std::max(lo, prof->x_min()),
                                      std::min(hi, prof->x_max()));
            } else {
                row.error = sup_error(u, ref_fn, lo, hi);
            }
        } catch (const std::exception& e) {
            row.note = e.what();
        }
    });
    return rows;
}

} // namespace fkdv
