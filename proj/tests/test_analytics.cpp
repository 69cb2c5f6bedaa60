#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rabibloch/analytics.hpp"
#include "rabibloch/observables.hpp"

using namespace rabibloch;

namespace {

ChainParams fig3_params() {
    ChainParams p;
    p.n_sites = 128;
    p.omega0 = 1.0;
    p.drive_freq = 1.0;
    p.rabi = 0.8;
    p.bloch = 0.04;
    p.t_a = 0.4;
    p.t_b = 0.04;
    return p;
}

// Independent oracle: eigenvalues of the 2x2 matrix
// [[2 t_a c, -Omega_R/2], [-Omega_R/2, 2 t_b c]] by trace/determinant.
std::pair<double, double> eigen_oracle(double phi, const ChainParams& p) {
    const double c = std::cos(phi);
    const double a = 2.0 * p.t_a * c, d = 2.0 * p.t_b * c, b = -0.5 * p.rabi;
    const double tr = a + d, det = a * d - b * b;
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 + disc, tr / 2.0 - disc};
}

// Complete elliptic integral of the second kind E(m) by AGM
// (independent route for the quadrature cross-check).
double elliptic_e(double m) {
    // E(m) = K(m) (1 - sum_{n>=0} 2^{n-1} c_n^2), c_0^2 = m, c_{n+1} = (a_n-g_n)/2
    double a = 1.0, g = std::sqrt(1.0 - m), sum = 1.0 - 0.5 * m;
    double pow2 = 0.5;
    for (int i = 0; i < 60 && std::abs(a - g) > 1e-17; ++i) {
        const double c = 0.5 * (a - g);
        const double an = 0.5 * (a + g);
        const double gn = std::sqrt(a * g);
        pow2 *= 2.0;
        sum -= pow2 * c * c;
        a = an;
        g = gn;
    }
    return sum * M_PI / (2.0 * a);
}

}  // namespace

TEST_CASE("mode info at the zone edge") {
    const auto m = mode_info(M_PI / 2.0, fig3_params());
    CHECK(m.nu1 == Catch::Approx(0.4).margin(1e-14));
    CHECK(m.nu2 == Catch::Approx(-0.4).margin(1e-14));
    CHECK(m.lambda == Catch::Approx(1.0).margin(1e-14));
    CHECK(m.big_omega == Catch::Approx(0.8).margin(1e-14));
    CHECK(m.mu == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("mode info for symmetric bands") {
    auto p = fig3_params();
    p.t_a = p.t_b = 0.3;
    const double phi = 0.7;
    const auto m = mode_info(phi, p);
    CHECK(m.nu1 == Catch::Approx(2.0 * 0.3 * std::cos(phi) + 0.4).margin(1e-14));
    CHECK(m.nu2 == Catch::Approx(2.0 * 0.3 * std::cos(phi) - 0.4).margin(1e-14));
    CHECK(m.lambda == Catch::Approx(1.0).margin(1e-14));
    CHECK(m.big_omega == Catch::Approx(0.8).margin(1e-14));
}

TEST_CASE("mode info at phi = 0 against the matrix oracle") {
    const auto p = fig3_params();
    const auto m = mode_info(0.0, p);
    CHECK(m.mu == Catch::Approx(0.44).margin(1e-14));
    CHECK(m.nu1 == Catch::Approx(0.97814).margin(1e-5));
    CHECK(m.nu2 == Catch::Approx(-0.09814).margin(1e-5));
    CHECK(m.lambda == Catch::Approx(0.44536).margin(1e-5));
    CHECK(m.big_omega == Catch::Approx(1.07629).margin(1e-5));
    const auto [e1, e2] = eigen_oracle(0.0, p);
    CHECK(m.nu1 == Catch::Approx(e1).margin(1e-12));
    CHECK(m.nu2 == Catch::Approx(e2).margin(1e-12));
}

TEST_CASE("Vieta identities over random parameter draws") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ur(0.05, 2.0);
    for (int i = 0; i < 1000; ++i) {
        ChainParams p = fig3_params();
        p.t_a = u(rng);
        p.t_b = u(rng);
        p.rabi = ur(rng);
        const double phi = 4.0 * u(rng);
        const double c = std::cos(phi);
        const auto m = mode_info(phi, p);
        CHECK(m.nu1 + m.nu2 ==
              Catch::Approx(2.0 * (p.t_a + p.t_b) * c).margin(1e-12));
        CHECK(m.nu1 * m.nu2 ==
              Catch::Approx(4.0 * p.t_a * p.t_b * c * c -
                            0.25 * p.rabi * p.rabi)
                  .margin(1e-12));
        CHECK(m.nu1 >= m.nu2);
        // eigen-residual of (1, -Lambda) at nu1
        const double r1 = (m.nu1 - 2.0 * p.t_a * c) * 1.0 +
                          0.5 * p.rabi * (-m.lambda);
        const double r2 = 0.5 * p.rabi * 1.0 +
                          (m.nu1 - 2.0 * p.t_b * c) * (-m.lambda);
        CHECK(std::abs(r1) < 1e-12);
        CHECK(std::abs(r2) < 1e-12);
    }
}

TEST_CASE("degenerate mode is reported") {
    auto p = fig3_params();
    p.rabi = 0.0;
    p.t_a = p.t_b = 0.3;
    CHECK_THROWS_AS(mode_info(0.0, p), DegenerateModeError);
}

TEST_CASE("travelling wave factors at t = 0") {
    const auto p = fig3_params();
    const double phi = 0.5;
    const auto m = mode_info(phi, p);
    const double c1 = std::sqrt(1.0 / (1.0 + m.lambda * m.lambda));
    const auto [fa, fb] =
        travelling_wave_factors(phi, 0.0, Complex(c1, 0.0), Complex(0.0, 0.0), p);
    CHECK(std::abs(fa - Complex(c1, 0.0)) < 1e-14);
    CHECK(std::abs(fb - Complex(-m.lambda * c1, 0.0)) < 1e-14);
}

TEST_CASE("coefficient normalization is enforced") {
    const auto p = fig3_params();
    CHECK_THROWS_AS(
        travelling_wave_factors(0.5, 0.0, Complex(1.0, 0.0), Complex(1.0, 0.0), p),
        std::invalid_argument);
}

TEST_CASE("excited start reproduces the closed-form populations") {
    const auto p = fig3_params();
    const double phi = 0.9;
    const auto m = mode_info(phi, p);
    const auto [c1, c2] = excited_start_coefficients(phi, p);
    const double L2 = m.lambda * m.lambda;
    for (double t : {0.0, 0.7, 2.2, 5.9}) {
        const auto [fa, fb] = travelling_wave_factors(phi, t, c1, c2, p);
        const double expect_b = 4.0 * L2 *
                                std::pow(std::sin(0.5 * m.big_omega * t), 2) /
                                ((1.0 + L2) * (1.0 + L2));
        CHECK(std::norm(fb) == Catch::Approx(expect_b).margin(1e-12));
        CHECK(std::norm(fa) + std::norm(fb) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("per-site probability is constant in time for equal tunneling") {
    auto p = fig3_params();
    p.t_a = p.t_b = 0.2;
    const double phi = 1.1;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // random coefficient split obeying the budget (Lambda = 1 -> 1/2)
    const double frac = u(rng);
    const Complex c1 = std::polar(std::sqrt(0.5 * frac), 2.0 * u(rng));
    const Complex c2 = std::polar(std::sqrt(0.5 * (1.0 - frac)), 2.0 * u(rng));
    for (double t : {0.0, 0.3, 1.7, 4.1}) {
        const auto [fa, fb] = travelling_wave_factors(phi, t, c1, c2, p);
        CHECK(std::norm(fa) + std::norm(fb) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("travelling wave chain state is normalized") {
    auto p = fig3_params();
    p.boundary = Boundary::periodic;
    const auto [c1, c2] = excited_start_coefficients(0.7, p);
    const auto s = travelling_wave_state(0.7, 1.3, c1, c2, p);
    CHECK(state_norm(s) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("closed-form current limits") {
    const auto p = fig3_params();
    CHECK(closed_form_current(0.6, 0.0, p) ==
          Catch::Approx(-2.0 * p.t_a * std::sin(0.6)).margin(1e-12));
    for (double t : {0.0, 1.0, 3.0})
        CHECK(closed_form_current(0.0, t, p) == Catch::Approx(0.0).margin(1e-15));
    auto ps = p;
    ps.t_a = ps.t_b = 0.3;
    for (double t : {0.0, 1.0, 3.0})
        CHECK(closed_form_current(0.8, t, ps) ==
              Catch::Approx(-2.0 * 0.3 * std::sin(0.8)).margin(1e-12));
}

TEST_CASE("closed-form current equals the discrete current on the wave state") {
    auto p = fig3_params();
    p.boundary = Boundary::periodic;
    const double phi = 2.0 * M_PI * 9.0 / p.n_sites;  // ring-commensurate
    const auto [c1, c2] = excited_start_coefficients(phi, p);
    for (double t : {0.0, 0.9, 2.7}) {
        const auto s = travelling_wave_state(phi, t, c1, c2, p);
        const auto j = tunneling_current_density(s, p);
        const double expect = closed_form_current(phi, t, p);
        for (int i = 0; i < p.n_sites; ++i)
            CHECK(p.n_sites * j[i] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("mean RO frequency: constant integrand") {
    auto p = fig3_params();
    p.t_a = p.t_b = 0.5;
    CHECK(mean_ro_frequency_rwa(p) == Catch::Approx(0.8).margin(1e-14));
}

TEST_CASE("mean RO frequency: pure tunneling limit") {
    auto p = fig3_params();
    p.rabi = 0.0;
    CHECK(mean_ro_frequency_rwa(p) ==
          Catch::Approx(4.0 * 0.36 / M_PI).margin(1e-7));
}

TEST_CASE("mean RO frequency against the elliptic-integral identity") {
    const auto p = fig3_params();
    const double delta = p.t_a - p.t_b;
    const double s2 = 4.0 * delta * delta + p.rabi * p.rabi;
    const double m = 4.0 * delta * delta / s2;
    const double oracle = 2.0 / M_PI * std::sqrt(s2) * elliptic_e(m);
    const double got = mean_ro_frequency_rwa(p);
    CHECK(got == Catch::Approx(oracle).epsilon(1e-8));
    CHECK(got == Catch::Approx(0.943237).margin(5e-6));
}

TEST_CASE("mean RO frequency stays inside the integrand bounds") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int i = 0; i < 100; ++i) {
        ChainParams p = fig3_params();
        p.t_a = u(rng);
        p.t_b = u(rng);
        p.rabi = u(rng) + 0.01;
        const double delta = std::abs(p.t_a - p.t_b);
        const double hi = std::sqrt(4.0 * delta * delta + p.rabi * p.rabi);
        const double got = mean_ro_frequency_rwa(p, 4096);
        CHECK(got >= p.rabi - 1e-12);
        CHECK(got <= hi + 1e-12);
    }
}

TEST_CASE("quasi-classical substitution matches the static dispersion") {
    const auto p = fig3_params();
    const auto r0 = quasiclassical_ro(0.0, 0.0, p);
    const auto m0 = mode_info(0.0, p);
    CHECK(r0.omega == Catch::Approx(m0.big_omega).margin(1e-14));
    CHECK(r0.lambda == Catch::Approx(m0.lambda).margin(1e-14));
    // Omega(t) has period pi / Omega_B
    const double T = M_PI / p.bloch;
    for (double t : {0.3, 1.9, 7.4})
        CHECK(quasiclassical_ro(t, 0.4, p).omega ==
              Catch::Approx(quasiclassical_ro(t + T, 0.4, p).omega)
                  .margin(1e-12));
    auto ps = p;
    ps.t_a = ps.t_b = 1.0;
    for (double t : {0.0, 0.7, 2.9}) {
        const auto r = quasiclassical_ro(t, 0.2, ps);
        CHECK(r.omega == Catch::Approx(0.8).margin(1e-14));
        CHECK(r.lambda == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("dc-only envelope as printed") {
    auto p = fig3_params();
    p.t_a = p.t_b = 9.0;
    for (double t : {0.0, 1.1}) {
        const auto r = stark_quasiclassical(t, 0.3, p);
        CHECK(r.omega == Catch::Approx(p.rabi).margin(1e-14));
        CHECK(r.lambda == Catch::Approx(1.0).margin(1e-14));
    }
    // cos(.) = 0
    auto q = fig3_params();
    const double t0 = (0.5 * M_PI) / q.bloch;
    const auto r = stark_quasiclassical(t0, 0.0, q);
    CHECK(r.omega == Catch::Approx(q.rabi).margin(1e-12));
    CHECK(r.lambda == Catch::Approx(1.0).margin(1e-12));
    // direct evaluation at cos(.) = 1: Omega = sqrt(0.36^2 + 0.8^2),
    // Lambda = 0.8/(0.36 + Omega)
    const auto r1 = stark_quasiclassical(0.0, 0.0, q);
    CHECK(r1.omega == Catch::Approx(0.8772685).margin(1e-6));
    CHECK(r1.lambda == Catch::Approx(0.6465852).margin(1e-6));
}

TEST_CASE("both quasi-classical forms are exposed and differ as printed") {
    const auto p = fig3_params();
    const auto f = quasiclassical_forms(0.0, 0.0, p);
    const double dc = (p.t_a - p.t_b);
    CHECK(f.rabi_bloch.omega * f.rabi_bloch.omega -
              f.stark_printed.omega * f.stark_printed.omega ==
          Catch::Approx(3.0 * dc * dc).margin(1e-12));
}

TEST_CASE("super-Bloch detuning") {
    auto p = fig3_params();
    const double ob = mean_ro_frequency_rwa(p);
    p.bloch = ob / 1.04;
    CHECK(super_bloch_detuning(p, 1) == Catch::Approx(0.04).margin(1e-10));
}

TEST_CASE("equal tunneling gives a plain Bloch-periodic position") {
    ChainParams p;
    p.n_sites = 128;
    p.omega0 = 1.0;
    p.rabi = 0.0;
    p.t_a = p.t_b = 0.3;
    p.bloch = 0.1;
    const double TB = 2.0 * M_PI / p.bloch;
    const auto [ts, xs] = super_bloch_trace(2.0 * TB, 0.0, p, 1e-3);
    // x(t) = (2 t / Omega_B)(cos(phi0 - wB t) - cos(phi0)) type sinusoid
    const std::size_t nq = xs.size() / 8;      // quarter period
    const std::size_t nh = xs.size() / 4;      // half period
    CHECK(std::abs(xs[2 * nh] - xs[0]) < 1e-3);  // returns after one period
    CHECK(std::abs(xs[nh]) > std::abs(xs[nq]));
    const double expect_ampl = 2.0 * 0.3 / p.bloch * 2.0;
    CHECK(std::abs(xs[nh]) == Catch::Approx(expect_ampl).epsilon(1e-3));
}

TEST_CASE("on resonance the position grows secularly") {
    auto p = fig3_params();
    const double ob = mean_ro_frequency_rwa(p);
    p.bloch = ob;  // m = 1, delta = 0
    const double TB = 2.0 * M_PI / p.bloch;
    const auto [ts, xs] = super_bloch_trace(24.0 * TB, 0.5 * M_PI, p, 1e-3);
    auto running_max = [&](std::size_t upto) {
        double m = 0.0;
        for (std::size_t i = 0; i < upto; ++i) m = std::max(m, std::abs(xs[i]));
        return m;
    };
    const double third = running_max(xs.size() / 3);
    const double whole = running_max(xs.size());
    CHECK(whole / third > 2.0);
    CHECK(whole / third < 4.0);
}
