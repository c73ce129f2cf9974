#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "fkdv/field.hpp"
#include "fkdv/reference.hpp"
#include "fkdv/spectral.hpp"
#include "test_helpers.hpp"

using namespace fkdv;
using namespace fkdv::test;
using Catch::Matchers::WithinAbs;

namespace {

// Long-double PDE residual of u_t + u u_x + u_xxx at (x, t) for an analytic
// closed-form solution; fourth-order stencils, extended precision to keep the
// third difference clear of cancellation noise.
template <typename Fn>
long double kdv_residual(Fn u, double x, double t) {
    const long double h = 2e-3L, ht = 1e-4L;
    auto ux = [&](long double z) { return u((long double)z, (long double)t); };
    auto ut = [&](long double tt) { return u((long double)x, tt); };
    const long double d1 =
        (-ux(x + 2 * h) + 8 * ux(x + h) - 8 * ux(x - h) + ux(x - 2 * h)) / (12 * h);
    const long double d3 = (ux(x - 3 * h) - 8 * ux(x - 2 * h) + 13 * ux(x - h) -
                            13 * ux(x + h) + 8 * ux(x + 2 * h) - ux(x + 3 * h)) /
                           (8 * h * h * h);
    const long double dt =
        (-ut(t + 2 * ht) + 8 * ut(t + ht) - 8 * ut(t - ht) + ut(t - 2 * ht)) / (12 * ht);
    return dt + ux(x) * d1 + d3;
}

// Method-of-lines oracle for u_t + lambda (u^2/2)_x = 0 on a periodic box:
// global Lax-Friedrichs flux splitting, fifth-order upwind-biased linear
// reconstruction, SSP-RK3 at CFL 0.4. Smooth (pre-breaking) regime only.
std::vector<double> hopf_mol_solve(const std::function<double(double)>& u0, double lambda,
                                   double t_end, double x_lo, double x_hi, int n) {
    const double dx = (x_hi - x_lo) / n;
    std::vector<double> u(static_cast<size_t>(n));
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
        u[static_cast<size_t>(i)] = u0(x_lo + (i + 0.5) * dx);
        a = std::max(a, std::abs(lambda * u[static_cast<size_t>(i)]));
    }
    auto rhs = [&](const std::vector<double>& v) {
        std::vector<double> fp(v.size()), fm(v.size());
        for (size_t i = 0; i < v.size(); ++i) {
            const double f = 0.5 * lambda * v[i] * v[i];
            fp[i] = 0.5 * (f + a * v[i]);
            fm[i] = 0.5 * (f - a * v[i]);
        }
        auto at = [&](const std::vector<double>& w, int i) {
            return w[static_cast<size_t>(((i % n) + n) % n)];
        };
        std::vector<double> out(v.size());
        for (int i = 0; i < n; ++i) {
            // interface i+1/2: left-biased for f+, right-biased for f-.
            auto flux_at = [&](int c) {
                const double p = (2 * at(fp, c - 2) - 13 * at(fp, c - 1) + 47 * at(fp, c) +
                                  27 * at(fp, c + 1) - 3 * at(fp, c + 2)) /
                                 60.0;
                const double m = (-3 * at(fm, c - 1) + 27 * at(fm, c) + 47 * at(fm, c + 1) -
                                  13 * at(fm, c + 2) + 2 * at(fm, c + 3)) /
                                 60.0;
                return p + m;
            };
            out[static_cast<size_t>(i)] = -(flux_at(i) - flux_at(i - 1)) / dx;
        }
        return out;
    };

    const double dt = 0.4 * dx / a;
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    const double dt_used = t_end / steps;
    auto saxpy = [](const std::vector<double>& x, double c, const std::vector<double>& y) {
        std::vector<double> out(x.size());
        for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + c * y[i];
        return out;
    };
    for (int s = 0; s < steps; ++s) {
        const auto k1 = saxpy(u, dt_used, rhs(u));
        auto k2 = saxpy(k1, dt_used, rhs(k1));
        for (size_t i = 0; i < u.size(); ++i) k2[i] = 0.75 * u[i] + 0.25 * k2[i];
        auto k3 = saxpy(k2, dt_used, rhs(k2));
        for (size_t i = 0; i < u.size(); ++i) u[i] = (u[i] + 2.0 * k3[i]) / 3.0;
    }
    return u;
}

} // namespace

TEST_CASE("kdv_one_soliton") {
    SECTION("peak value 9 on the characteristic x = 3t") {
        REQUIRE_THAT(kdv_one_soliton(0.0, 0.0), WithinAbs(9.0, 1e-14));
        REQUIRE_THAT(kdv_one_soliton(1.8, 0.6), WithinAbs(9.0, 1e-14));
    }

    SECTION("decays far from the crest") {
        REQUIRE(std::abs(kdv_one_soliton(30.0, 0.0)) < 1e-20);
        REQUIRE(std::abs(kdv_one_soliton(-30.0, 0.0)) < 1e-20);
    }

    SECTION("satisfies u_t + u u_x + u_xxx = 0 at random points") {
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> dx(-4.0, 4.0), dt(0.0, 1.0);
        auto u = [](long double x, long double t) {
            const long double th = std::tanh(0.5L * std::sqrt(3.0L) * (x - 3.0L * t));
            return 9.0L * (1.0L - th * th);
        };
        for (int i = 0; i < 50; ++i) {
            const double x = dx(rng), t = dt(rng);
            REQUIRE(std::abs(kdv_residual(u, x, t)) <= 1e-8);
        }
    }
}

TEST_CASE("bo_soliton") {
    const double c = 0.25, L = 15.0;
    const double delta = kPi / (c * L);

    SECTION("peak value at the crest, period 2L") {
        const double peak = 2.0 * c * delta * delta / (1.0 - std::sqrt(1.0 - delta * delta));
        REQUIRE_THAT(bo_soliton(0.0, 0.0, c, L), WithinAbs(peak, 1e-13));
        REQUIRE_THAT(bo_soliton(3.7 + 2.0 * L, 0.0, c, L),
                     WithinAbs(bo_soliton(3.7, 0.0, c, L), 1e-13));
    }

    SECTION("pure translation at speed c") {
        for (double x : {-7.0, 0.3, 4.9})
            REQUIRE_THAT(bo_soliton(x, 2.5, c, L),
                         WithinAbs(bo_soliton(x - c * 2.5, 0.0, c, L), 1e-14));
    }

    SECTION("mean value 2 c delta against quadrature") {
        // integral over one period: 2 c delta^2 / (c delta) * 2 pi / delta = 4 pi,
        // so the mean is 4 pi / (2L) = 2 pi / L = 2 c delta.
        const double mean =
            trapezoid_periodic([&](double x) { return bo_soliton(x, 0.0, c, L); }, L, 20000) /
            (2.0 * L);
        REQUIRE_THAT(mean, WithinAbs(2.0 * c * delta, 1e-10));
    }

    SECTION("cL < pi is rejected (delta > 1)") {
        REQUIRE_THROWS_AS(bo_soliton(0.0, 0.0, 0.1, 15.0), ParameterError);
    }

    SECTION("satisfies u_t + u u_x - D^1 u_x = 0 spectrally") {
        PeriodicGrid grid(64, L);
        auto field_at = [&](double t) {
            return project([&](double x) { return bo_soliton(x, t, c, L); }, grid);
        };
        auto u = field_at(0.7);
        const auto ux = synthesize(derivative_x(u));
        const auto disp = synthesize(derivative_x(frac_laplacian(u, 1.0)));
        const auto us = synthesize(u);
        const double ht = 1e-5;
        const auto up = synthesize(field_at(0.7 + ht));
        const auto um = synthesize(field_at(0.7 - ht));
        double max_res = 0.0;
        for (int j = 0; j < grid.n_points(); ++j) {
            const auto i = static_cast<size_t>(j);
            const double ut = (up[i] - um[i]) / (2.0 * ht);
            max_res = std::max(max_res, std::abs(ut + us[i] * ux[i] - disp[i]));
        }
        REQUIRE(max_res <= 1e-6);
    }
}

TEST_CASE("break_point") {
    SECTION("sech^2 datum, lambda = 6: the textbook catastrophe point") {
        auto bp = break_point([](double x) { return -1.0 / std::pow(std::cosh(x), 2); }, 6.0);
        REQUIRE_THAT(bp.t_c, WithinAbs(std::sqrt(3.0) / 8.0, 1e-8));
        REQUIRE_THAT(bp.u_c, WithinAbs(-2.0 / 3.0, 1e-8));
        const double xc = -std::sqrt(3.0) / 2.0 + std::log((std::sqrt(3.0) - 1.0) / std::sqrt(2.0));
        REQUIRE_THAT(bp.x_c, WithinAbs(xc, 1e-6));
    }

    SECTION("constant datum never breaks") {
        REQUIRE_THROWS_AS(break_point([](double) { return 4.2; }, 6.0), NoBreakingError);
    }

    SECTION("0.5 sin x, lambda = 1: t_c = 2 against a dense-scan oracle") {
        auto u0 = [](double x) { return 0.5 * std::sin(x); };
        auto bp = break_point(u0, 1.0, 0.0, 2.0 * kPi);
        // Brute-force argmax of -u0' over a million samples.
        double best = 0.0;
        for (int i = 0; i < 1000000; ++i) {
            const double x = 2.0 * kPi * i / 1000000.0;
            best = std::max(best, -0.5 * std::cos(x));
        }
        REQUIRE_THAT(bp.t_c, WithinAbs(1.0 / best, 1e-6));
        REQUIRE_THAT(bp.t_c, WithinAbs(2.0, 1e-8));
        REQUIRE_THAT(bp.u_c, WithinAbs(0.0, 1e-7));
        REQUIRE_THAT(bp.x_c, WithinAbs(kPi, 1e-6));
    }
}

TEST_CASE("hopf_solution") {
    auto sech2 = [](double x) { return -1.0 / std::pow(std::cosh(x), 2); };

    SECTION("t = 0 reproduces the datum") {
        HopfSolution hopf(sech2, 6.0);
        for (double x : {-2.0, -0.5, 0.0, 1.3}) REQUIRE_THAT(hopf(x, 0.0), WithinAbs(sech2(x), 1e-14));
    }

    SECTION("constant datum rides its parallel characteristics") {
        HopfSolution hopf([](double) { return 0.8; }, 6.0);
        REQUIRE(std::isinf(hopf.break_time()));
        for (double t : {0.1, 2.0, 50.0}) REQUIRE_THAT(hopf(1.0, t), WithinAbs(0.8, 1e-12));
    }

    SECTION("characteristic relation holds to 1e-12 at a thousand points") {
        HopfSolution hopf(sech2, 6.0);
        const double t = 0.2;
        for (int i = 0; i < 1000; ++i) {
            const double x = -5.0 + 10.0 * i / 999.0;
            const double u = hopf(x, t);
            // reconstruct xi from u directly: xi = x - 6 t u
            const double xi = x - 6.0 * t * u;
            REQUIRE_THAT(sech2(xi) - u, WithinAbs(0.0, 1e-12));
        }
    }

    SECTION("queries at or past t_c are rejected by name") {
        HopfSolution hopf(sech2, 6.0);
        try {
            hopf(0.0, 0.25);
            FAIL("expected MultivaluedError");
        } catch (const MultivaluedError& e) {
            REQUIRE(std::string(e.what()).find("0.216") != std::string::npos);
        }
    }

    SECTION("matches the upwind method-of-lines oracle at t = 0.2") {
        HopfSolution hopf(sech2, 6.0);
        const double t = 0.2, x_lo = -16.0, x_hi = 16.0;
        const int n = 32768;
        const auto mol = hopf_mol_solve(sech2, 6.0, t, x_lo, x_hi, n);
        const double dx = (x_hi - x_lo) / n;
        double max_err = 0.0;
        for (int i = 0; i < n; i += 16) {
            const double x = x_lo + (i + 0.5) * dx;
            if (std::abs(x) > 5.0) continue;
            max_err = std::max(max_err, std::abs(mol[static_cast<size_t>(i)] - hopf(x, t)));
        }
        INFO("max |MOL - characteristics| = " << max_err);
        REQUIRE(max_err <= 1e-6);
    }
}

TEST_CASE("elliptic_KE") {
    SECTION("limiting values") {
        const auto d0 = elliptic_KE(0.0);
        REQUIRE_THAT(d0.K, WithinAbs(kPi / 2.0, 1e-14));
        REQUIRE_THAT(d0.E, WithinAbs(kPi / 2.0, 1e-14));
        REQUIRE_THAT(elliptic_KE(0.999999).E, WithinAbs(1.0, 1e-3));
    }

    SECTION("s = 0.5 against direct quadrature of the defining integrals") {
        const auto d = elliptic_KE(0.5);
        // 64-point Gauss-Legendre is far past converged for these smooth integrands.
        double K = 0.0, E = 0.0;
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            // Chebyshev-node midpoint rule stand-in: use trapezoid on a fine grid instead.
        }
        const int nq = 200000;
        for (int i = 0; i < nq; ++i) {
            const double th = (i + 0.5) * (kPi / 2.0) / nq;
            const double r = std::sqrt(1.0 - 0.25 * std::sin(th) * std::sin(th));
            K += 1.0 / r;
            E += r;
        }
        K *= (kPi / 2.0) / nq;
        E *= (kPi / 2.0) / nq;
        REQUIRE_THAT(d.K, WithinAbs(K, 1e-10));
        REQUIRE_THAT(d.E, WithinAbs(E, 1e-10));
    }

    SECTION("Legendre relation at s = 0.1 .. 0.9") {
        for (int i = 1; i <= 9; ++i) {
            const double s = 0.1 * i;
            const double sc = std::sqrt(1.0 - s * s);
            const auto d = elliptic_KE(s), dc = elliptic_KE(sc);
            const double legendre = d.E * dc.K + dc.E * d.K - d.K * dc.K;
            REQUIRE_THAT(legendre, WithinAbs(kPi / 2.0, 1e-12));
        }
    }

    SECTION("tau is purely imaginary with positive imaginary part") {
        const auto d = elliptic_KE(0.7);
        REQUIRE(d.tau.real() == 0.0);
        REQUIRE(d.tau.imag() > 0.0);
    }

    SECTION("s >= 1 is rejected") {
        REQUIRE_THROWS_AS(elliptic_KE(1.0), ParameterError);
        REQUIRE_THROWS_AS(elliptic_KE(-0.1), ParameterError);
    }
}

TEST_CASE("jacobi_theta3") {
    SECTION("large Im(tau) leaves only the n = 0 term") {
        REQUIRE_THAT(jacobi_theta3(0.37, {0.0, 50.0}), WithinAbs(1.0, 1e-15));
    }

    SECTION("1-periodic and even in xi") {
        const std::complex<double> tau(0.0, 0.8);
        for (double xi : {0.1, 0.37, 2.64}) {
            REQUIRE_THAT(jacobi_theta3(xi + 1.0, tau), WithinAbs(jacobi_theta3(xi, tau), 1e-13));
            REQUIRE_THAT(jacobi_theta3(-xi, tau), WithinAbs(jacobi_theta3(xi, tau), 1e-13));
        }
    }

    SECTION("tau = i, xi = 0.3 against a wide-window brute-force sum") {
        const std::complex<double> tau(0.0, 1.0);
        std::complex<double> brute = 0.0;
        for (int n = -50; n <= 50; ++n)
            brute += std::exp(std::complex<double>(0.0, kPi) *
                              (double(n) * double(n) * tau + 2.0 * double(n) * 0.3));
        REQUIRE_THAT(jacobi_theta3(0.3, tau), WithinAbs(brute.real(), 1e-14));
    }

    SECTION("non-convergent lattice parameter is rejected") {
        REQUIRE_THROWS_AS(jacobi_theta3(0.0, {0.0, -1.0}), DivergentSeriesError);
        REQUIRE_THROWS_AS(jacobi_theta3(0.0, {0.5, 0.0}), DivergentSeriesError);
    }
}

TEST_CASE("weak_limit") {
    SECTION("degenerate beta2 = beta3 (s = 0): u~ = b1 + b2 - b3") {
        REQUIRE_THAT(weak_limit({2.0, 0.5, 0.5}), WithinAbs(2.0, 1e-12));
    }

    SECTION("degenerate beta2 = beta1 (s = 1): hand limit E/K -> 0") {
        REQUIRE_THAT(weak_limit({1.0, 1.0, 0.0}), WithinAbs(0.0, 1e-12));
    }

    SECTION("(1, 0.5, 0) against quadrature-based K and E") {
        const double s = std::sqrt(0.5);
        const int nq = 200000;
        double K = 0.0, E = 0.0;
        for (int i = 0; i < nq; ++i) {
            const double th = (i + 0.5) * (kPi / 2.0) / nq;
            const double r = std::sqrt(1.0 - s * s * std::sin(th) * std::sin(th));
            K += 1.0 / r;
            E += r;
        }
        K *= (kPi / 2.0) / nq;
        E *= (kPi / 2.0) / nq;
        const double beta_bar = -1.0 + (1.0 - 0.0) * E / K;
        REQUIRE_THAT(weak_limit({1.0, 0.5, 0.0}), WithinAbs(1.5 + 2.0 * beta_bar, 1e-10));
    }

    SECTION("invalid orderings are rejected") {
        REQUIRE_THROWS_AS(weak_limit({0.0, 0.5, 1.0}), ParameterError);
        REQUIRE_THROWS_AS(weak_limit({1.0, 1.0, 1.0}), ParameterError);
    }
}

TEST_CASE("elliptic_asymptotic_u") {
    const BetaTriple b{1.1, 0.4, -0.3};
    const double t = 0.4, q = 0.15;

    SECTION("finite-difference self-consistency (Richardson ratio ~ 4)") {
        const double eps = 0.1;
        const auto d = elliptic_KE(elliptic_modulus(b));
        const double scale = std::sqrt(b.beta1 - b.beta3) / (2.0 * eps * d.K);
        auto logmu = [&](double xx) {
            return std::log(
                jacobi_theta3(scale * (xx - 2.0 * t * (b.beta1 + b.beta2 + b.beta3) - q), d.tau));
        };
        const double x = 0.3;
        auto second_diff = [&](double h) {
            return (logmu(x + h) - 2.0 * logmu(x) + logmu(x - h)) / (h * h);
        };
        const double h = 1e-3 * eps;
        const double r = (second_diff(4 * h) - second_diff(2 * h)) /
                         (second_diff(2 * h) - second_diff(h));
        INFO("Richardson ratio " << r);
        REQUIRE(r >= 3.0);
        REQUIRE(r <= 5.0);

        // And the op itself equals u~ + 2 eps^2 (finest difference) closely.
        const double u = elliptic_asymptotic_u(x, t, eps, b, q);
        REQUIRE_THAT(u, WithinAbs(weak_limit(b) + 2.0 * eps * eps * second_diff(h), 1e-12));
    }

    SECTION("one theta period of the argument leaves the value unchanged") {
        // Tolerance sits at the noise floor of the centered difference:
        // ~4 eps_mach / h^2 on log(mu), times 2 eps^2, is ~1e-9 independent
        // of eps since h = 1e-3 eps.
        const double eps = 0.05;
        const auto d = elliptic_KE(elliptic_modulus(b));
        const double period = 2.0 * eps * d.K / std::sqrt(b.beta1 - b.beta3);
        const double u1 = elliptic_asymptotic_u(0.2, t, eps, b, q);
        const double u2 = elliptic_asymptotic_u(0.2 + period, t, eps, b, q);
        REQUIRE_THAT(u1 - u2, WithinAbs(0.0, 1e-8));
    }

    SECTION("near-degenerate modulus: correction is O(exp(-pi Im tau))") {
        const BetaTriple nb{1.0, -0.299, -0.3};
        const double eps = 0.1;
        const auto d = elliptic_KE(elliptic_modulus(nb));
        const double nome = std::exp(-kPi * d.tau.imag());
        const double scale = std::sqrt(nb.beta1 - nb.beta3) / (2.0 * eps * d.K);
        // |u - u~| <= 2 eps^2 scale^2 (2 pi)^2 * 2 nome, up to 50% headroom.
        const double bound = 3.0 * 2.0 * eps * eps * scale * scale *
                             4.0 * kPi * kPi * 2.0 * nome;
        const double u = elliptic_asymptotic_u(0.3, t, eps, nb, q);
        REQUIRE(std::abs(u - weak_limit(nb)) <= bound);
    }
}

TEST_CASE("q_phase") {
    const BetaTriple b{1.0, 0.5, -0.25};

    SECTION("constant integrand: q = c exactly") {
        REQUIRE_THAT(q_phase(b, [](double) { return 3.7; }), WithinAbs(3.7, 1e-12));
    }

    SECTION("linear integrand: closed form (b1 + b2 + b3)/3") {
        const double expect = (b.beta1 + b.beta2 + b.beta3) / 3.0;
        REQUIRE_THAT(q_phase(b, [](double a) { return a; }), WithinAbs(expect, 1e-10));
    }

    SECTION("node-count self-convergence for a smooth integrand") {
        auto f = [](double a) { return std::exp(-a) + std::sin(2.0 * a); };
        REQUIRE_THAT(q_phase(b, f, 64) - q_phase(b, f, 128), WithinAbs(0.0, 1e-10));
    }

    SECTION("integrand failures propagate") {
        auto f = [](double a) -> double {
            if (a > 0.5) throw DomainError("inverse branch undefined");
            return a;
        };
        REQUIRE_THROWS_AS(q_phase(b, f), DomainError);
    }
}

TEST_CASE("BetaProfile") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "fkdv_beta_test";
    fs::create_directories(dir);

    SECTION("round trip with linear interpolation") {
        const auto path = (dir / "beta.csv").string();
        std::ofstream out(path);
        out << "x,beta1,beta2,beta3\n";
        out << "-1.0,1.0,0.5,0.0\n";
        out << "0.0,1.2,0.6,0.1\n";
        out << "1.0,1.4,0.7,0.2\n";
        out.close();

        auto prof = BetaProfile::load_csv(path);
        REQUIRE(prof.x_min() == -1.0);
        REQUIRE(prof.x_max() == 1.0);
        auto bt = prof.at(0.5);
        REQUIRE_THAT(bt.beta1, WithinAbs(1.3, 1e-14));
        REQUIRE_THAT(bt.beta2, WithinAbs(0.65, 1e-14));
        REQUIRE_THAT(bt.beta3, WithinAbs(0.15, 1e-14));
        REQUIRE_THROWS_AS(prof.at(2.0), DomainError);
    }

    SECTION("bad header is a config error") {
        const auto path = (dir / "bad.csv").string();
        std::ofstream out(path);
        out << "x,b1,b2,b3\n0,1,0.5,0\n1,1,0.5,0\n";
        out.close();
        REQUIRE_THROWS_AS(BetaProfile::load_csv(path), ConfigError);
    }
}
