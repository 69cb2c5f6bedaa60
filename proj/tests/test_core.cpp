#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstring>
#include <random>

#include "rabibloch/core.hpp"

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

bool mentions(const std::vector<std::string>& errors, const char* needle) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
        return e.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("validate accepts the reference parameter set") {
    CHECK(validate(fig3_params()).empty());
}

TEST_CASE("validate reports every violation, not just the first") {
    ChainParams p = fig3_params();
    p.n_sites = 0;
    p.gamma = -0.1;
    p.omega0 = -1.0;
    const auto errors = validate(p);
    CHECK(errors.size() >= 3);
    CHECK(mentions(errors, "n_sites"));
    CHECK(mentions(errors, "gamma"));
    CHECK(mentions(errors, "omega0"));
}

TEST_CASE("gaussian packet is normalized and peaks at its center") {
    const auto p = fig3_params();
    const auto state = make_initial_state(p, {80.0, 20.0, true, 0.0});
    CHECK(state_norm(state) == Catch::Approx(1.0).margin(1e-12));
    CHECK(state.time == 0.0);
    double amax = 0.0;
    int jmax = -1;
    for (int j = 0; j < p.n_sites; ++j) {
        if (std::abs(state.amp_excited[j]) > amax) {
            amax = std::abs(state.amp_excited[j]);
            jmax = j;
        }
        CHECK(state.amp_ground[j] == Complex(0.0, 0.0));
    }
    CHECK(jmax == 80);
}

TEST_CASE("zero width collapses to a single-site state") {
    const auto p = fig3_params();
    const auto state = make_initial_state(p, {17.0, 0.0, false, 0.0});
    CHECK(state.amp_ground[17] == Complex(1.0, 0.0));
    CHECK(state_norm(state) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("plane-wave phase leaves the magnitudes unchanged") {
    const auto p = fig3_params();
    const auto flat = make_initial_state(p, {80.0, 20.0, true, 0.0});
    const auto tilted = make_initial_state(p, {80.0, 20.0, true, 0.3});
    for (int j = 0; j < p.n_sites; ++j)
        CHECK(std::abs(tilted.amp_excited[j]) ==
              Catch::Approx(std::abs(flat.amp_excited[j])).margin(1e-15));
}

TEST_CASE("packet construction is deterministic bit for bit") {
    const auto p = fig3_params();
    const auto s1 = make_initial_state(p, {80.0, 20.0, true, 0.3});
    const auto s2 = make_initial_state(p, {80.0, 20.0, true, 0.3});
    CHECK(std::memcmp(s1.amp_excited.data(), s2.amp_excited.data(),
                      sizeof(Complex) * s1.amp_excited.size()) == 0);
}

TEST_CASE("norm of random packets is 1 within 1e-12") {
    auto p = fig3_params();
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> center(0.0, 127.0);
    std::uniform_real_distribution<double> width(0.5, 40.0);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const auto s = make_initial_state(
            p, {center(rng), width(rng), (i & 1) != 0, phase(rng)});
        CHECK(state_norm(s) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("norm is the quadratic form of the amplitudes") {
    const auto p = fig3_params();
    auto s = make_initial_state(p, {64.0, 10.0, true, 0.0});
    CHECK(state_norm(s) == Catch::Approx(1.0).margin(1e-12));
    for (auto& z : s.amp_excited) z *= 0.5;
    for (auto& z : s.amp_ground) z *= 0.5;
    CHECK(state_norm(s) == Catch::Approx(0.25).margin(1e-12));
    AmplitudeState zero;
    zero.amp_excited.assign(4, {});
    zero.amp_ground.assign(4, {});
    CHECK(state_norm(zero) == 0.0);
}

TEST_CASE("invalid packet width is rejected") {
    const auto p = fig3_params();
    CHECK_THROWS_AS(make_initial_state(p, {10.0, -1.0, true, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("gamma from Q factor") {
    CHECK(gamma_from_q(1.0, 15.0) == Catch::Approx(1.0 / 30.0));
    CHECK_THROWS_AS(gamma_from_q(1.0, 0.0), std::invalid_argument);
}
