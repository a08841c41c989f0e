// test_phases.cpp - dynamical, Berry, Pancharatnam and geometric phases; amplitude equation

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adlab/phases.hpp"
#include "adlab/propagation.hpp"
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

// Distance of |phi| from the spin-1/2 solid-angle phase pi (1 - cos theta), modulo 2 pi.
double cyclic_error(double phi, double theta) {
    const double target = pi * (1 - std::cos(theta));
    double best = 1e9;
    for (double s : {1.0, -1.0}) best = std::min(best, std::abs(wrap_angle(phi - s * target)));
    return best;
}

std::vector<Vec> exact_states(const HamiltonianModel<double>& m, const TimeGrid<double>& g, const Vec& psi0) {
    return propagate_exact(m, g).evolve(psi0);
}

}  // namespace

TEST_CASE("dynamical_phase") {
    SUBCASE("constant energy") {
        Mat H = Mat::Zero(2, 2);
        H(0, 0) = 0.7;
        H(1, 1) = -0.4;
        const TimeGrid<double> g(0, 5, 50);
        const auto s = decompose_tracked(make_static_model(H), g);
        const auto d = dynamical_phase(s, 1);
        for (Index k = 0; k < g.size(); ++k) CHECK(d[k] == doctest::Approx(-0.7 * g[k]).epsilon(1e-13));
        CHECK(d[0] == 0);
    }
    SUBCASE("Schwinger level 1") {
        const TimeGrid<double> g(0, 10, 1000);
        const auto d = dynamical_phase(tracked(make_schwinger_model<double>({1.3, 1.0, 0.2}), g), 0);
        for (Index k = 0; k < g.size(); k += 100) CHECK(d[k] == doctest::Approx(-1.3 * g[k]).epsilon(1e-12));
    }
    SUBCASE("MS level over one drive period against a fine Simpson oracle") {
        const double W = 0.1, T = 2 * pi / W;
        const auto s = tracked(make_ms_model<double>({1.0, W}), TimeGrid<double>(0, T, 20000));
        const double want = -oracle::simpson([&](double t) { return std::sqrt(1 + W * W * std::pow(std::sin(t), 2)); },
                                             0, T, 400000);
        PhaseOptions rich;
        rich.quadrature = Quadrature::Richardson;
        CHECK(std::abs(dynamical_phase(s, 0, rich)[s.size() - 1] - want) < 1e-8);
        CHECK(std::abs(dynamical_phase(s, 0)[s.size() - 1] - want) < 1e-5);
    }
}

TEST_CASE("berry_accumulator") {
    SUBCASE("constant H") {
        Mat H(2, 2);
        H << 1, 0.2, 0.2, -1;
        const auto s = decompose_tracked(make_static_model(H), TimeGrid<double>(0, 3, 30));
        const auto acc = berry_accumulator(s, couplings(s), 0);
        CHECK(acc.gamma.cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("closed-form gauge: rate -omega cos theta / 2, gamma(T) = -pi cos theta") {
        for (double th : {pi / 3, 1.0, 2.0}) {
            const double w = 0.2, T = 2 * pi / w;
            const auto s = closed_form_frames(make_schwinger_model<double>({1, th, w}), TimeGrid<double>(0, T, 20000));
            const auto acc = berry_accumulator(s, couplings(s), 0);
            CHECK(acc.gamma[s.size() - 1] == doctest::Approx(-pi * std::cos(th)).epsilon(1e-6));
            CHECK(acc.imaginary_residual < 1e-8);
            CHECK(acc.gauge == std::string(kClosedFormGauge));
        }
    }
    SUBCASE("parallel-transport gauge: gamma stays near zero") {
        const auto s = tracked(make_schwinger_model<double>({1, 1.0, 0.2}), TimeGrid<double>(0, 10 * pi, 10000));
        const auto acc = berry_accumulator(s, couplings(s), 0);
        CHECK(acc.gamma.cwiseAbs().maxCoeff() < 1e-8);
        CHECK(acc.gauge == std::string(kParallelTransportGauge));
    }
    SUBCASE("re-gauging shifts gamma by -(beta(t) - beta(0))") {
        const TimeGrid<double> g(0, 10, 10000);
        const auto s = closed_form_frames(make_schwinger_model<double>({1, 1.0, 0.2}), g);
        const auto beta = [&](double t) { return 2 * std::sin(1.7 * t + 0.4) + 0.3 * t * t; };
        const auto s2 = regauge(s, [&](Index k, Index) { return beta(g[k]); });
        const auto g0 = berry_accumulator(s, couplings(s), 0).gamma;
        const auto g1 = berry_accumulator(s2, couplings(s2), 0).gamma;
        for (Index k = 0; k < g.size(); ++k) CHECK(std::abs(g1[k] - g0[k] + beta(g[k]) - beta(0)) < 1e-10);
        PhaseOptions rich;
        rich.quadrature = Quadrature::Richardson;
        const auto r0 = berry_accumulator(s, couplings(s), 0, rich).gamma;
        CHECK((r0 - g0).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("non-real accumulator") {
        const auto s = closed_form_frames(make_schwinger_model<double>({1, 1.0, 0.2}), TimeGrid<double>(0, 1, 10));
        auto c = couplings(s);
        for (auto& ck : c) ck.d(0, 0) += 0.5;  // a real part in <n|n'> means the frames are not normalized
        CHECK_THROWS_AS(berry_accumulator(s, c, 0), NonRealAccumulator);
    }
}

TEST_CASE("pancharatnam_phase") {
    SUBCASE("pure phase evolution") {
        const TimeGrid<double> g(0, 10, 1000);
        Vec psi0(2);
        psi0 << 0.6, 0.8 * I;
        std::vector<Vec> states;
        for (Index k = 0; k < g.size(); ++k) states.push_back(std::exp(I * (0.9 * g[k] + 0.1 * std::sin(g[k]))) * psi0);
        const auto ph = pancharatnam_phase(states, g);
        for (Index k = 0; k < g.size(); k += 100) CHECK(ph[k] == doctest::Approx(0.9 * g[k] + 0.1 * std::sin(g[k])));
    }
    SUBCASE("Schwinger exact evolution against the closed-form overlap") {
        const SchwingerParams<double> p{1, 1.1, 0.3};
        const auto m = make_schwinger_model(p);
        const TimeGrid<double> g(0, 8, 8000);
        const auto states = exact_states(m, g, m.exact_eigensystem(0.0).states.col(0));
        const auto ph = pancharatnam_phase(states, g);
        for (Index k = 0; k < g.size(); k += 400) {
            const double t = g[k];
            const Mat U = schwinger_exact_propagator_elements(p, t);
            const std::complex<double> ov = oracle::schwinger_n1(1.1, 0).dot(oracle::schwinger_n1(1.1, 0.3 * t)) * U(0, 0) +
                                            oracle::schwinger_n1(1.1, 0).dot(oracle::schwinger_n2(1.1, 0.3 * t)) * U(1, 0);
            CHECK(std::abs(wrap_angle(ph[k] - std::arg(ov))) < 1e-8);
        }
    }
    SUBCASE("orthogonal states") {
        const TimeGrid<double> g(0, 1, 2);
        Vec a(2), b(2);
        a << 1, 0;
        b << 0, 1;
        CHECK_THROWS_AS(pancharatnam_phase(std::vector<Vec>{a, a, b}, g), OrthogonalStates);
    }
}

TEST_CASE("geometric_phase_noncyclic") {
    SUBCASE("cyclic Schwinger loop approaches pi (1 - cos theta)") {
        for (double th : {pi / 3, pi / 2}) {
            std::vector<double> err, phi;
            for (double w : {0.05, 0.02, 0.01}) {
                const auto m = make_schwinger_model<double>({1, th, w});
                const double T = 2 * pi / w;
                const TimeGrid<double> g(0, T, static_cast<Index>(std::lround(T / 2e-3)) | 1);
                const auto nc = geometric_phase_noncyclic(exact_states(m, g, m.exact_eigensystem(0.0).states.col(0)), g);
                phi.push_back(nc.total[g.size() - 1]);
                err.push_back(cyclic_error(phi.back(), th));
            }
            CHECK(err[1] < err[0]);
            CHECK(err[2] < err[1]);
            CHECK(err[2] < 0.05);
            // the error is first order in omega: extrapolate omega -> 0 from 0.02 and 0.01
            CHECK(cyclic_error(2 * phi[2] - phi[1], th) < 2e-2);
        }
    }
    SUBCASE("invariant under smooth re-phasing of the states") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.3});
        const TimeGrid<double> g(0, 6, 6000);
        const auto states = exact_states(m, g, m.exact_eigensystem(0.0).states.col(0));
        const auto base = geometric_phase_noncyclic(states, g).total;
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int trial = 0; trial < 10; ++trial) {
            const double a = u(rng), c = 1 + u(rng), d = 3 * u(rng), e = 0.4 * u(rng);
            std::vector<Vec> moved;
            for (Index k = 0; k < g.size(); ++k) moved.push_back(std::exp(I * (a * std::sin(c * g[k] + d) + e * g[k])) * states[k]);
            const auto other = geometric_phase_noncyclic(moved, g).total;
            CHECK((other - base).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    SUBCASE("eigenstate of a constant H has no geometric phase") {
        Mat H(2, 2);
        H << 0.5, 0.2 * I, -0.2 * I, -0.3;
        const auto m = make_static_model(H);
        const TimeGrid<double> g(0, 10, 10000);
        Eigen::SelfAdjointEigenSolver<Mat> es(H);
        const auto nc = geometric_phase_noncyclic(exact_states(m, g, es.eigenvectors().col(1)), g);
        CHECK(nc.total.cwiseAbs().maxCoeff() < 1e-6);
        CHECK(nc.reference_section.cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("connection route equals the reference-section route") {
        for (const auto& m : {make_schwinger_model<double>({1, 1.2, 0.4}), make_ms_model<double>({1.0, 0.3})}) {
            const TimeGrid<double> g(0, 5, 10000);
            const Vec psi0 = m.exact_eigensystem(0.0).states.col(0);
            const auto nc = geometric_phase_noncyclic(exact_states(m, g, psi0), g);
            CHECK((nc.total - nc.reference_section).cwiseAbs().maxCoeff() < 1e-5);
        }
    }
}

TEST_CASE("open_path_adiabatic_phase") {
    SUBCASE("closed eigenvector loop") {
        for (double th : {pi / 3, 1.0, 2.4}) {
            const double w = 0.2, T = 2 * pi / w;
            const auto s = tracked(make_schwinger_model<double>({1, th, w}), TimeGrid<double>(0, T, 20001));
            const auto op = open_path_adiabatic_phase(s, couplings(s), 0);
            CHECK(cyclic_error(op[s.size() - 1], th) < 1e-6);
            CHECK(op[0] == 0);
            CHECK(std::abs(op[1]) < 1e-6);
        }
    }
    SUBCASE("invariant under re-gauging the frames") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.25});
        const TimeGrid<double> g(0, 12, 12001);
        const auto s = tracked(m, g);
        const auto base = open_path_adiabatic_phase(s, couplings(s), 0);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int trial = 0; trial < 10; ++trial) {
            const double a = u(rng), c = 1 + u(rng), d = 3 * u(rng);
            const auto s2 = regauge(s, [&](Index k, Index n) { return a * std::sin(c * g[k] + d + n) + 0.1 * g[k]; });
            CHECK((open_path_adiabatic_phase(s2, couplings(s2), 0) - base).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    SUBCASE("orthogonal eigenvector path") {
        // theta = pi/2: <n(0)|n(t)> = cos(omega t / 2) vanishes at omega t = pi
        const auto s = tracked(make_schwinger_model<double>({1, pi / 2, 0.5}), TimeGrid<double>(0, 4 * pi, 400));
        CHECK_THROWS_AS(open_path_adiabatic_phase(s, couplings(s), 0), OrthogonalStates);
    }
}

TEST_CASE("amplitude_ode_solutions") {
    SUBCASE("constant H") {
        Mat H(2, 2);
        H << 1, 0.5, 0.5, 0;
        const auto s = decompose_tracked(make_static_model(H), TimeGrid<double>(0, 4, 40));
        const auto rec = amplitude_ode_solutions(s, couplings(s), 0);
        CHECK(rec.source.cwiseAbs().maxCoeff() < 1e-15);
        for (const Vec* a : {&rec.A_exact, &rec.A_ode, &rec.A_adiabatic, &rec.A_series})
            CHECK((*a - Vec::Ones(a->size())).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("the amplitude equation is exact on both models") {
        for (const auto& m : {make_schwinger_model<double>({1, 1.0, 0.3}), make_ms_model<double>({1.0, 0.4})}) {
            const TimeGrid<double> g(0, 10, 10000);
            const auto s = tracked(m, g);
            const auto rec = amplitude_ode_solutions(s, couplings(s), 0);
            CHECK((rec.A_ode - rec.A_exact).cwiseAbs().maxCoeff() < 1e-5);
            CHECK((rec.A_series - rec.A_exact).cwiseAbs().maxCoeff() < 1e-5);
            for (const Vec* a : {&rec.A_exact, &rec.A_ode, &rec.A_adiabatic, &rec.A_series}) {
                CHECK(std::abs((*a)[0] - 1.0) < 1e-15);
                CHECK(a->cwiseAbs().maxCoeff() <= 1 + 1e-9);
            }
        }
    }
    SUBCASE("the same identity holds in any gauge") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.3});
        const TimeGrid<double> g(0, 10, 10000);
        const auto s = regauge(closed_form_frames(m, g), [&](Index k, Index n) { return 0.5 * std::cos(g[k] + n); });
        const auto rec = amplitude_ode_solutions(s, couplings(s), 0);
        CHECK((rec.A_ode - rec.A_exact).cwiseAbs().maxCoeff() < 1e-5);
    }
    SUBCASE("A_ode is second order in dt") {
        const auto m = make_ms_model<double>({1.0, 0.5});
        auto err = [&](Index steps) {
            const auto s = tracked(m, TimeGrid<double>(0, 6, steps));
            const auto rec = amplitude_ode_solutions(s, couplings(s), 0);
            return (rec.A_ode - rec.A_exact).cwiseAbs().maxCoeff();
        };
        CHECK(err(1000) / err(2000) == doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("zeroed source reduces to the strict adiabatic amplitude") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.3});
        const auto s = closed_form_frames(m, TimeGrid<double>(0, 10, 10000));
        AmplitudeOptions o;
        o.zero_source = true;
        const auto rec = amplitude_ode_solutions(s, couplings(s), 0, o);
        CHECK(rec.source_zeroed);
        CHECK(rec.Q.cwiseAbs().maxCoeff() == 0);
        CHECK((rec.A_ode - rec.A_adiabatic).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((rec.A_series - rec.A_adiabatic).cwiseAbs().maxCoeff() == 0);
    }
}

TEST_CASE("corrected_geometric_phase") {
    SUBCASE("Q = 0 gives identically zero") {
        const auto m = make_schwinger_model<double>({1, pi / 2, 0.1});
        const TimeGrid<double> g(0, 2 * pi / 0.1, 20001);
        const auto s = tracked(m, g);
        AmplitudeOptions o;
        o.zero_source = true;
        const auto phi = corrected_geometric_phase(amplitude_ode_solutions(s, couplings(s), 0, o), g);
        CHECK(phi.cwiseAbs().maxCoeff() == 0);
    }
    SUBCASE("agrees with the open-path phase at small omega") {
        const auto m = make_schwinger_model<double>({1, 1.0, 0.05});
        const TimeGrid<double> g(0, 60, 60001);
        const auto s = tracked(m, g);
        const auto c = couplings(s);
        const auto phi = corrected_geometric_phase(amplitude_ode_solutions(s, c, 0), g);
        const auto op = open_path_adiabatic_phase(s, c, 0);
        CHECK((phi - op).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(phi.cwiseAbs().maxCoeff() > 0.1);
    }
    SUBCASE("omega -> -omega at theta = pi/2 is the sigma_x mirror: Q and the phase are unchanged") {
        // sigma_x H(omega) sigma_x = H(-omega) when cos theta = 0, so every overlap is preserved
        const TimeGrid<double> g(0, 45, 45001);
        auto run = [&](double w) {
            const auto s = tracked(make_schwinger_model<double>({1, pi / 2, w}), g);
            const auto rec = amplitude_ode_solutions(s, couplings(s), 0);
            return std::pair{rec, corrected_geometric_phase(rec, g)};
        };
        const auto [rp, php] = run(0.1);
        const auto [rm, phm] = run(-0.1);
        CHECK((rp.Q - rm.Q).cwiseAbs().maxCoeff() < 1e-9);
        double worst = 0;  // the jump through |Q| at phi = pi may unwrap either way: compare modulo 2 pi
        for (Index k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(wrap_angle(php[k] - phm[k])));
        CHECK(worst < 1e-9);
        CHECK(php.cwiseAbs().maxCoeff() > 0.1);
    }
    SUBCASE("branch singularity") {
        AmplitudeRecord<double> rec;
        rec.Q = Vec::Zero(3);
        rec.Q[2] = std::complex<double>(0.3, -1.0);
        CHECK_THROWS_AS(corrected_geometric_phase(rec, TimeGrid<double>(0, 1, 2)), BranchSingularity);
    }
}

TEST_CASE("phase_report bundles every route") {
    const auto m = make_schwinger_model<double>({1, 1.0, 0.2});
    const TimeGrid<double> g(0, 2 * pi / 0.2, 20001);
    const auto s = tracked(m, g);
    const auto c = couplings(s);
    const auto rep = phase_report(s, c, propagate_exact(m, g).evolve(s.state(0, 0)), 0);
    CHECK(rep.delta[0] == 0);
    CHECK(rep.gamma[0] == 0);
    CHECK(rep.delta[g.size() - 1] == doctest::Approx(-2 * pi / 0.2));
    CHECK((rep.phi_corrected - rep.geom_openpath).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(rep.gauge == std::string(kParallelTransportGauge));
    CHECK(rep.source.size() == g.size());
}
