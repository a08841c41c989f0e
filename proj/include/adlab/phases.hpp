// phases.hpp - dynamical phase, Berry accumulator, Pancharatnam and geometric phases, and the
// transition-amplitude equation with its non-adiabatic source S_n and integral Q_n.

#pragma once

#include "adlab/errors.hpp"
#include "adlab/quadrature.hpp"
#include "adlab/spectral.hpp"
#include "adlab/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace adlab {

struct PhaseOptions {
    Quadrature quadrature = Quadrature::Trapezoid;
    double orthogonality_tol = 1e-6;  // |<a|b>| below this leaves Arg undefined
    double nonreal_tol = 1e-6;        // tolerated imaginary part of the Berry accumulator
    double branch_tol = 1e-9;         // |1 + Im Q| floor for the arctan form
};

// delta_n(t) = -int_0^t E_n
template <class Real>
RVector<Real> dynamical_phase(const FrameSeries<Real>& series, Index n, const PhaseOptions& opts = {}) {
    return cumulative_integral(RVector<Real>(-series.energy(n)), series.grid.dt(), opts.quadrature);
}

template <class Real>
struct BerryAccumulator {
    RVector<Real> gamma;       // int_0^t i<n|n'>, real part
    Real imaginary_residual{}; // max |Im| of the same integral
    std::string gauge;
};

template <class Real>
BerryAccumulator<Real> berry_accumulator(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                                         Index n, const PhaseOptions& opts = {}) {
    const Index K = series.size();
    CVector<Real> rate(K);
    for (Index k = 0; k < K; ++k) rate[k] = Complex<Real>(0, 1) * coup[static_cast<std::size_t>(k)].d(n, n);
    const CVector<Real> acc = cumulative_integral(rate, series.grid.dt(), opts.quadrature);
    BerryAccumulator<Real> out{acc.real(), acc.imag().cwiseAbs().maxCoeff(), series.gauge};
    // Second-order default: the neighbour-overlap sum, which re-phasing shifts exactly.
    if (opts.quadrature == Quadrature::Trapezoid) out.gamma = -accumulated_pancharatnam(series, n);
    if (out.imaginary_residual > Real(opts.nonreal_tol)) {
        throw NonRealAccumulator("berry_accumulator: imaginary part " +
                                 std::to_string(static_cast<double>(out.imaginary_residual)) + " for level " +
                                 std::to_string(n));
    }
    return out;
}

// Unwrapped Arg<psi(0)|psi(t)>.
template <class Real>
RVector<Real> pancharatnam_phase(const std::vector<CVector<Real>>& states, const TimeGrid<Real>& grid,
                                 const PhaseOptions& opts = {}) {
    const Index K = static_cast<Index>(states.size());
    RVector<Real> wrapped(K);
    for (Index k = 0; k < K; ++k) {
        const Complex<Real> ov = states.front().dot(states[static_cast<std::size_t>(k)]);
        if (std::abs(ov) < Real(opts.orthogonality_tol)) {
            throw OrthogonalStates(static_cast<double>(grid[k]), static_cast<double>(std::abs(ov)));
        }
        wrapped[k] = std::arg(ov);
    }
    return unwrap(wrapped);
}

// i <psi|psi'> for unit states, differentiating the overlap phase Arg<psi(t_k)|psi(t)>
// (second order; a smooth re-phasing enters only through its own central difference).
template <class Real>
RVector<Real> state_connection(const std::vector<CVector<Real>>& states, Real dt) {
    const Index K = static_cast<Index>(states.size());
    if (K < 3) throw std::invalid_argument("state_connection: need at least 3 samples");
    const auto at = [&](Index j) -> const CVector<Real>& { return states[static_cast<std::size_t>(j)]; };
    RVector<Real> a(K);
    for (Index k = 0; k < K; ++k) a[k] = -detail::overlap_phase_rate(at, k, K, dt);
    return a;
}

template <class Real>
struct NoncyclicPhase {
    RVector<Real> total;              // Arg<psi(0)|psi(t)> + i int <psi|psi'>
    RVector<Real> reference_section;  // i int <chi|chi'>, chi = (<psi|psi0>/|.|) psi
};

template <class Real>
NoncyclicPhase<Real> geometric_phase_noncyclic(const std::vector<CVector<Real>>& states, const TimeGrid<Real>& grid,
                                               const PhaseOptions& opts = {}) {
    const Real dt = grid.dt();
    NoncyclicPhase<Real> out;
    const RVector<Real> pan = pancharatnam_phase(states, grid, opts);
    // i int <psi|psi'>: neighbour-overlap sum by default (exactly gauge covariant), else
    // Simpson on the differenced connection
    auto connection_integral = [&](const std::vector<CVector<Real>>& v) -> RVector<Real> {
        if (opts.quadrature == Quadrature::Trapezoid)
            return discrete_connection_integral<Real>([&](Index j) -> const CVector<Real>& { return v[static_cast<std::size_t>(j)]; },
                                                      static_cast<Index>(v.size()));
        return cumulative_integral(state_connection(v, dt), dt, opts.quadrature);
    };
    out.total = pan + connection_integral(states);

    std::vector<CVector<Real>> chi;
    chi.reserve(states.size());
    for (const auto& psi : states) {
        const Complex<Real> ov = psi.dot(states.front());
        chi.push_back((ov / std::abs(ov)) * psi);
    }
    out.reference_section = connection_integral(chi);
    return out;
}

// Arg<n(0)|n(t)> + i int <n|n'>
template <class Real>
RVector<Real> open_path_adiabatic_phase(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                                        Index n, const PhaseOptions& opts = {}) {
    const Index K = series.size();
    const CVector<Real> first = series.state(0, n);
    RVector<Real> wrapped(K);
    for (Index k = 0; k < K; ++k) {
        const Complex<Real> ov = first.dot(series.state(k, n));
        if (std::abs(ov) < Real(opts.orthogonality_tol)) {
            throw OrthogonalStates(static_cast<double>(series[k].t), static_cast<double>(std::abs(ov)));
        }
        wrapped[k] = std::arg(ov);
    }
    PhaseOptions lenient = opts;
    lenient.nonreal_tol = std::numeric_limits<double>::infinity();
    return RVector<Real>(unwrap(wrapped) + berry_accumulator(series, coup, n, lenient).gamma);
}

// Transition amplitude A_n(t) = <n(0)|n(t)> by four routes.
template <class Real>
struct AmplitudeRecord {
    Index level{};
    RVector<Real> gamma;     // Berry accumulator in the series gauge
    CVector<Real> source;    // S_n(t)
    CVector<Real> Q;         // int S_n e^{i gamma}
    CVector<Real> A_exact;   // from the frames
    CVector<Real> A_ode;     // Crank-Nicolson solution of i A' = gamma' A + S_n
    CVector<Real> A_adiabatic;  // e^{-i gamma}
    CVector<Real> A_series;  // e^{-i gamma} (1 - i Q)
    bool source_zeroed{false};
    std::string gauge;
};

struct AmplitudeOptions {
    Quadrature quadrature = Quadrature::Trapezoid;
    bool zero_source = false;  // strict adiabatic limit: drop every <m|n'>, m != n
};

// S_n(t) = i sum_{m != n} <n(0)|m(t)><m(t)|n'(t)>. The factor i makes
// i dA_n/dt = gamma_n' A_n + S_n an identity for A_n = <n(0)|n(t)>.
template <class Real>
CVector<Real> amplitude_source(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup, Index n) {
    const Index K = series.size(), N = series.levels();
    const CVector<Real> first = series.state(0, n);
    CVector<Real> S(K);
    for (Index k = 0; k < K; ++k) {
        Complex<Real> acc = 0;
        for (Index m = 0; m < N; ++m) {
            if (m == n) continue;
            acc += first.dot(series.state(k, m)) * coup[static_cast<std::size_t>(k)].d(m, n);
        }
        S[k] = Complex<Real>(0, 1) * acc;
    }
    return S;
}

template <class Real>
AmplitudeRecord<Real> amplitude_ode_solutions(const FrameSeries<Real>& series,
                                              const std::vector<CouplingMatrix<Real>>& coup, Index n,
                                              const AmplitudeOptions& opts = {}) {
    const Index K = series.size();
    const Real dt = series.grid.dt();
    const Complex<Real> i(0, 1);
    PhaseOptions po;
    po.quadrature = opts.quadrature;
    po.nonreal_tol = std::numeric_limits<double>::infinity();

    AmplitudeRecord<Real> rec;
    rec.level = n;
    rec.gauge = series.gauge;
    rec.source_zeroed = opts.zero_source;
    rec.gamma = berry_accumulator(series, coup, n, po).gamma;
    rec.source = opts.zero_source ? CVector<Real>(CVector<Real>::Zero(K)) : amplitude_source(series, coup, n);

    RVector<Real> rate(K);
    for (Index k = 0; k < K; ++k) rate[k] = (i * coup[static_cast<std::size_t>(k)].d(n, n)).real();

    rec.A_exact.resize(K);
    rec.A_adiabatic.resize(K);
    CVector<Real> weighted(K);
    const CVector<Real> first = series.state(0, n);
    for (Index k = 0; k < K; ++k) {
        rec.A_exact[k] = first.dot(series.state(k, n));
        rec.A_adiabatic[k] = std::polar(Real(1), -rec.gamma[k]);
        weighted[k] = rec.source[k] * std::polar(Real(1), rec.gamma[k]);
    }
    rec.Q = cumulative_integral(weighted, dt, opts.quadrature);
    rec.A_series = rec.A_adiabatic.cwiseProduct((CVector<Real>::Ones(K) - i * rec.Q).eval());

    // Crank-Nicolson on A' = -i (rate A + S)
    rec.A_ode.resize(K);
    rec.A_ode[0] = 1;
    for (Index k = 0; k + 1 < K; ++k) {
        const Complex<Real> rhs = rec.A_ode[k] - i * (dt / 2) * (rate[k] * rec.A_ode[k] + rec.source[k] + rec.source[k + 1]);
        rec.A_ode[k + 1] = rhs / (Real(1) + i * (dt / 2) * rate[k + 1]);
    }
    return rec;
}

// atan2(-Re Q, 1 + Im Q), continuously unwrapped.
template <class Real>
RVector<Real> corrected_geometric_phase(const AmplitudeRecord<Real>& rec, const TimeGrid<Real>& grid,
                                        const PhaseOptions& opts = {}) {
    const Index K = rec.Q.size();
    RVector<Real> wrapped(K);
    for (Index k = 0; k < K; ++k) {
        const Real den = 1 + rec.Q[k].imag();
        if (std::abs(den) < Real(opts.branch_tol)) {
            throw BranchSingularity("corrected_geometric_phase: 1 + Im Q vanishes at t=" +
                                    std::to_string(static_cast<double>(grid[k])));
        }
        wrapped[k] = std::atan2(-rec.Q[k].real(), den);
    }
    return unwrap(wrapped);
}

// Everything the phases task reports for one level.
template <class Real>
struct PhaseReport {
    Index level{};
    RVector<Real> delta;
    RVector<Real> gamma;
    RVector<Real> pancharatnam;
    RVector<Real> geom_noncyclic;
    RVector<Real> geom_noncyclic_reference;
    RVector<Real> geom_openpath;
    CVector<Real> source;
    CVector<Real> Q;
    RVector<Real> phi_corrected;
    std::string gauge;
};

template <class Real>
PhaseReport<Real> phase_report(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                               const std::vector<CVector<Real>>& states, Index n, const PhaseOptions& opts = {}) {
    PhaseReport<Real> rep;
    rep.level = n;
    rep.gauge = series.gauge;
    rep.delta = dynamical_phase(series, n, opts);
    rep.gamma = berry_accumulator(series, coup, n, opts).gamma;
    rep.pancharatnam = pancharatnam_phase(states, series.grid, opts);
    const auto nc = geometric_phase_noncyclic(states, series.grid, opts);
    rep.geom_noncyclic = nc.total;
    rep.geom_noncyclic_reference = nc.reference_section;
    rep.geom_openpath = open_path_adiabatic_phase(series, coup, n, opts);
    AmplitudeOptions ao;
    ao.quadrature = opts.quadrature;
    const auto rec = amplitude_ode_solutions(series, coup, n, ao);
    rep.source = rec.source;
    rep.Q = rec.Q;
    rep.phi_corrected = corrected_geometric_phase(rec, series.grid, opts);
    return rep;
}

}  // namespace adlab
