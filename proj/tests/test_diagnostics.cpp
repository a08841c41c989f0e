// test_diagnostics.cpp - distances, the rotated-frame norm check, the epsilon bound and fidelity

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adlab/diagnostics.hpp"
#include "oracles.hpp"

#include <random>

using namespace adlab;
using oracle::I;
using oracle::pi;
using Mat = CMatrix<double>;
using Vec = CVector<double>;

namespace {

FrameSeries<double> tracked(const HamiltonianModel<double>& m, const TimeGrid<double>& g) {
    std::optional<Mat> ref;
    if (m.has_exact_eigensystem()) ref = m.exact_eigensystem(g[0]).states;
    return decompose_tracked(m, g, ref);
}

// |U21|^2 of the exact Schwinger solution: (omega sin theta / 2)^2 sin^2(E t) / E^2.
double schwinger_transition(double b, double th, double w, double t) {
    const double E = std::sqrt(b * b + b * w * std::cos(th) + w * w / 4);
    const double s = w * std::sin(th) / 2 * std::sin(E * t) / E;
    return s * s;
}

struct EpsRun {
    EpsilonBoundReport<double> rep;
    double eps_hat;
};

EpsRun epsilon_run(double th, double w, double t_end, Index steps) {
    const auto m = make_schwinger_model<double>({1, th, w});
    const TimeGrid<double> g(0, t_end, steps);
    const auto s = tracked(m, g);
    const auto traj = propagate_exact(m, g);
    const auto dec = decompose(traj, s);
    return {epsilon_lower_bound(dec, s, traj, 0), dec.epsilon_hat};
}

}  // namespace

TEST_CASE("min_normed_distance") {
    Vec a(2), b(2), c(2);
    a << 1, 0;
    b << 0, I;
    c << 0.5, std::sqrt(0.75) * std::exp(I * 0.3);
    CHECK(min_normed_distance(a, a) == 0);
    CHECK(min_normed_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(a.dot(c)) == doctest::Approx(0.5));
    CHECK(min_normed_distance(a, c) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(min_normed_distance(a, Vec(std::exp(I * 2.0) * a)) < 1e-15);

    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        Vec x(3), y(3);
        for (Index j = 0; j < 3; ++j) {
            x[j] = {nd(rng), nd(rng)};
            y[j] = {nd(rng), nd(rng)};
        }
        x.normalize();
        y.normalize();
        const double d = min_normed_distance(x, y);
        CHECK(d == doctest::Approx(min_normed_distance(y, x)).epsilon(1e-14));
        CHECK(d >= 0);
        CHECK(d <= std::sqrt(2.0) + 1e-15);
        CHECK(d == doctest::Approx(std::sqrt(2 * (1 - std::abs(x.dot(y))))).epsilon(1e-10));
    }
    CHECK_THROWS_AS(min_normed_distance(a, Vec(2 * a)), NotNormalized);
    CHECK_THROWS_AS(min_normed_distance(Vec(Vec::Zero(2)), a), NotNormalized);
}

TEST_CASE("marzlin_sanders_check") {
    SUBCASE("constant H: no inconsistency") {
        Mat H(2, 2);
        H << 0.3, 0.4 - 0.1 * I, 0.4 + 0.1 * I, -0.8;
        const auto rep = marzlin_sanders_check(make_static_model(H), TimeGrid<double>(0, 10, 200), 1);
        for (Index k = 0; k < rep.grid.size(); ++k) {
            CHECK(std::abs(std::abs(rep.norm_naive[k]) - 1) < 1e-12);
            CHECK(std::abs(std::abs(rep.norm_corrected[k]) - 1) < 1e-12);
            CHECK(std::abs(rep.norm_true[k] - 1) < 1e-12);
            CHECK(rep.hbar_residual[k] < 1e-10);
        }
    }
    SUBCASE("Schwinger theta = pi/2, omega = 0.1 over one drive period") {
        const double th = pi / 2, w = 0.1;
        const TimeGrid<double> g(0, 2 * pi / w, 20000);
        const auto rep = marzlin_sanders_check(make_schwinger_model<double>({1, th, w}), g, 0);
        double dip = 0, corrected = 0, unit = 0, hbar = 0;
        for (Index k = 0; k < g.size(); ++k) {
            // |<n1(0)|n1(t)>| from the closed-form eigenvectors
            const double want = std::abs(oracle::schwinger_n1(th, 0).dot(oracle::schwinger_n1(th, w * g[k])));
            CHECK(std::abs(std::abs(rep.norm_naive[k]) - want) < 1e-9);
            dip = std::max(dip, 1 - std::abs(rep.norm_naive[k]));
            corrected = std::max(corrected, std::abs(rep.norm_corrected[k] - 1.0));
            unit = std::max(unit, std::abs(rep.norm_true[k] - 1));
            hbar = std::max(hbar, rep.hbar_residual[k]);
        }
        CHECK(dip > 0.01);
        CHECK(corrected <= 1e-3);
        CHECK(unit <= 1e-10);
        CHECK(hbar <= 1e-8);
    }
    SUBCASE("MS model keeps the true norm and the H-bar eigen-relation") {
        const TimeGrid<double> g(0, 2 * pi, 4000);
        const auto rep = marzlin_sanders_check(make_ms_model<double>({1.0, 0.2}), g, 0);
        CHECK((rep.norm_true.array() - 1).abs().maxCoeff() <= 1e-10);
        CHECK(rep.hbar_residual.maxCoeff() <= 1e-8);
    }
}

TEST_CASE("epsilon_lower_bound") {
    SUBCASE("t = 0 is indeterminate") {
        const auto r = epsilon_run(pi / 2, 0.5, 5, 5000);
        CHECK(r.rep.D_eig[0] < 1e-12);
        CHECK(r.rep.D_state[0] < 1e-12);
        CHECK(r.rep.denom[0] < 1e-9);
        CHECK_FALSE(r.rep.determinate[0]);
        CHECK(std::isnan(r.rep.eps_lower[0]));
    }
    SUBCASE("soundness and range over adiabatic and non-adiabatic points") {
        for (double th : {pi / 4, pi / 2, 2.0})
            for (double w : {0.05, 0.3, 1.0}) {
                const auto r = epsilon_run(th, w, 20, 20000);
                CHECK(r.rep.eps_hat == r.eps_hat);
                CHECK_FALSE(r.rep.raw_form);
                for (Index k = 0; k < r.rep.grid.size(); ++k) {
                    CHECK(r.rep.D_eig[k] >= 0);
                    CHECK(r.rep.D_eig[k] <= 2);
                    CHECK(r.rep.D_state[k] >= 0);
                    CHECK(r.rep.D_state[k] <= 2);
                    if (r.rep.denom[k] > 1e-9) CHECK(r.rep.eps_lower[k] <= r.rep.eps_hat + 1e-6);
                }
            }
    }
    SUBCASE("non-adiabatic point has a positive bound somewhere") {
        const auto r = epsilon_run(pi / 2, 1.0, 20, 20000);
        CHECK(r.rep.max_bound() > 0);
        CHECK(r.rep.regime == "non-adiabatic");
    }
    SUBCASE("strict adiabatic point: the distances agree up to the transition amplitude") {
        // triangle inequality: |D_eig - D_state| <= D(n(t), psi(t)) = sqrt(2 (1 - sqrt(1 - |U21|^2)))
        std::vector<double> gaps;
        for (double w : {0.02, 0.01}) {
            const auto r = epsilon_run(pi / 2, w, 20, 20000);
            for (Index k = 0; k < r.rep.grid.size(); ++k) {
                const double p = schwinger_transition(1, pi / 2, w, r.rep.grid[k]);
                CHECK(std::abs(r.rep.D_eig[k] - r.rep.D_state[k]) <= std::sqrt(2 * (1 - std::sqrt(1 - p))) + 1e-9);
            }
            gaps.push_back((r.rep.D_eig - r.rep.D_state).cwiseAbs().maxCoeff());
            CHECK(r.rep.regime == "adiabatic");
        }
        MESSAGE("max |D_eig - D_state| at omega = 0.02, 0.01: " << gaps[0] << ", " << gaps[1]);
        CHECK(gaps[1] < gaps[0]);
    }
    SUBCASE("denominator is the off-diagonal column sum over eps_hat") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.4});
        const TimeGrid<double> g(0, 6, 6000);
        const auto s = tracked(m, g);
        const auto traj = propagate_exact(m, g);
        const auto dec = decompose(traj, s);
        const auto rep = epsilon_lower_bound(dec, s, traj, 0);
        for (Index k = 0; k < g.size(); k += 500)
            CHECK(rep.denom[k] == doctest::Approx(std::sqrt(schwinger_transition(1, 1.0, 0.4, g[k])) / dec.epsilon_hat)
                                      .epsilon(1e-6));
    }
    SUBCASE("constant H falls back to the raw form") {
        Mat H = Mat::Zero(2, 2);
        H(0, 0) = 1;
        H(1, 1) = -1;
        const auto m = make_static_model(H);
        const TimeGrid<double> g(0, 3, 30);
        const auto s = decompose_tracked(m, g);
        const auto traj = propagate_exact(m, g);
        const auto rep = epsilon_lower_bound(decompose(traj, s), s, traj, 0);
        CHECK(rep.raw_form);
        for (bool d : rep.determinate) CHECK_FALSE(d);
    }
}

TEST_CASE("fidelity_adiabatic_vs_exact") {
    auto deficit = [](double th, double w, const TimeGrid<double>& g, RVector<double>* out = nullptr) {
        const auto m = make_schwinger_model<double>({1, th, w});
        const auto s = tracked(m, g);
        const auto F = fidelity_adiabatic_vs_exact(propagate_adiabatic(s, couplings(s)), propagate_exact(m, g), s, 0);
        if (out) *out = F;
        return 1 - F.minCoeff();
    };
    SUBCASE("omega = 0 gives F = 1") {
        const TimeGrid<double> g(0, 10, 1000);
        RVector<double> F;
        deficit(1.0, 0.0, g, &F);
        CHECK((F.array() - 1).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches the exact transition probability") {
        for (double th : {pi / 3, pi / 2}) {
            const TimeGrid<double> g(0, 10, 10000);
            RVector<double> F;
            deficit(th, 0.1, g, &F);
            for (Index k = 0; k < g.size(); k += 250)
                CHECK(F[k] == doctest::Approx(1 - schwinger_transition(1, th, 0.1, g[k])).epsilon(1e-8));
        }
    }
    SUBCASE("quadratic law in omega sin theta / 2 with an order-one constant") {
        const TimeGrid<double> g(0, 10, 10000);
        const double th = pi / 2;
        const double d1 = deficit(th, 0.2, g), d2 = deficit(th, 0.1, g);
        const double x = 0.1 * std::sin(th) / 2;
        const double C = d2 / (x * x);
        MESSAGE("fitted C = " << C);
        CHECK(C > 0.5);
        CHECK(C < 2);
        CHECK(d1 / d2 >= 3.5);
        CHECK(d1 / d2 <= 4.5);
    }
    SUBCASE("grid mismatch") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.1});
        const auto s = tracked(m, TimeGrid<double>(0, 1, 10));
        CHECK_THROWS_AS(fidelity_adiabatic_vs_exact(propagate_adiabatic(s, couplings(s)),
                                                    propagate_exact(m, TimeGrid<double>(0, 1, 20)), s, 0),
                        std::invalid_argument);
    }
}
