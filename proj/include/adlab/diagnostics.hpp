// diagnostics.hpp - the rotated-frame (Marzlin-Sanders) norm check, minimum-normed distances,
// the lower bound on the smallness parameter, and adiabatic-vs-exact fidelity.

#pragma once

#include "adlab/errors.hpp"
#include "adlab/models.hpp"
#include "adlab/phases.hpp"
#include "adlab/propagation.hpp"
#include "adlab/spectral.hpp"
#include "adlab/types.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace adlab {

// D(a, b) = sqrt(2 (1 - |<a|b>|)) for unit vectors; in [0, sqrt 2].
template <class Real>
Real min_normed_distance(const CVector<Real>& a, const CVector<Real>& b, Real norm_tol = Real(1e-9)) {
    if (std::abs(a.norm() - 1) > norm_tol || std::abs(b.norm() - 1) > norm_tol) {
        throw NotNormalized("min_normed_distance: inputs must be unit vectors");
    }
    // 1 - |<a|b>| = |b - <a|b> a|^2 / (1 + |<a|b>|) keeps precision for nearby rays.
    const Complex<Real> ov = a.dot(b);
    const Real perp = (b - ov * a).squaredNorm() / (a.squaredNorm() * b.squaredNorm());
    const Real gap = std::clamp(perp / (1 + std::min(Real(1), std::abs(ov))), Real(0), Real(1));
    return std::sqrt(2 * gap);
}

template <class Real>
struct MSReport {
    TimeGrid<Real> grid;
    Index level{};
    CVector<Real> norm_naive;      // e^{i gamma_n} <n(0)|n(t)>
    CVector<Real> norm_corrected;  // e^{i gamma_n} A_n with A_n from i A' = gamma' A
    RVector<Real> norm_true;       // <psi_bar|psi_bar>, psi_bar = U^dag psi(0)
    RVector<Real> hbar_residual;   // |H_bar n_bar + E_n n_bar|, H_bar = -U^dag H U, n_bar = U^dag n
};

// The inputs are the exact trajectory and the tracked frames of the same model on the same grid.
template <class Real>
MSReport<Real> marzlin_sanders_check(const HamiltonianModel<Real>& model, const Trajectory<Real>& traj,
                                     const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                                     Index n, Quadrature q = Quadrature::Trapezoid) {
    const Index K = series.size();
    if (traj.size() != K) throw std::invalid_argument("marzlin_sanders_check: trajectory and frames differ in length");
    const Complex<Real> i(0, 1);
    PhaseOptions po;
    po.quadrature = q;
    po.nonreal_tol = std::numeric_limits<double>::infinity();
    const RVector<Real> gamma = berry_accumulator(series, coup, n, po).gamma;

    // Strict adiabatic amplitude: i A' = gamma' A, integrated on its own (Crank-Nicolson).
    AmplitudeOptions ao;
    ao.quadrature = q;
    ao.zero_source = true;
    const CVector<Real> A_strict = amplitude_ode_solutions(series, coup, n, ao).A_ode;

    MSReport<Real> rep{series.grid, n, CVector<Real>(K), CVector<Real>(K), RVector<Real>(K), RVector<Real>(K)};
    const CVector<Real> psi0 = series.state(0, n);
    for (Index k = 0; k < K; ++k) {
        const Complex<Real> berry = std::polar(Real(1), gamma[k]);
        rep.norm_naive[k] = berry * psi0.dot(series.state(k, n));
        rep.norm_corrected[k] = berry * A_strict[k];

        const CMatrix<Real>& U = traj[k];
        const CVector<Real> psibar = U.adjoint() * psi0;
        rep.norm_true[k] = psibar.squaredNorm();

        const CMatrix<Real> Hbar = -(U.adjoint() * model(series[k].t) * U);
        const CVector<Real> nbar = U.adjoint() * series.state(k, n);
        rep.hbar_residual[k] = (Hbar * nbar + series[k].energies[n] * nbar).norm();
    }
    return rep;
}

// Convenience overload: builds the exact trajectory and tracked frames itself.
template <class Real>
MSReport<Real> marzlin_sanders_check(const HamiltonianModel<Real>& model, const TimeGrid<Real>& grid, Index n,
                                     const PropagationOptions& popts = {}) {
    std::optional<CMatrix<Real>> ref;
    if (model.has_exact_eigensystem()) ref = model.exact_eigensystem(grid[0]).states;
    const auto series = decompose_tracked(model, grid, ref);
    const auto coup = couplings(series);
    const auto traj = propagate_exact(model, grid, popts);
    return marzlin_sanders_check(model, traj, series, coup, n);
}

template <class Real>
struct EpsilonBoundReport {
    TimeGrid<Real> grid;
    Index level{};
    RVector<Real> D_eig;    // D(|n(0)>, |n(t)>)
    RVector<Real> D_state;  // D(|psi(0)>, |psi(t)>), psi(0) = |n(0)>
    RVector<Real> denom;    // sum_{m != n} |dU_mn(t)|
    RVector<Real> eps_lower;
    std::vector<bool> determinate;  // false where denom <= floor (0/0 points)
    Real eps_hat{};
    bool raw_form{false};  // eps_hat == 0: denominators are raw |U_mn|
    std::string split_convention;
    std::string regime;  // "adiabatic" when eps_hat stays below the adiabatic threshold

    Real max_bound() const {
        Real best = -std::numeric_limits<Real>::infinity();
        for (Index k = 0; k < eps_lower.size(); ++k)
            if (determinate[static_cast<std::size_t>(k)]) best = std::max(best, eps_lower[k]);
        return best;
    }
};

struct EpsilonBoundOptions {
    double denom_floor = 1e-9;
    // eps_hat at or below this flags the adiabatic regime. The distance gap itself is no
    // discriminator: |D_eig - D_state| <= D(n(t), psi(t)) ~ |U_mn| by the triangle inequality.
    double adiabatic_threshold = 1e-2;
};

// eps >= [D(n(0), n(t)) - D(psi(0), psi(t))] / sum_{m != n} |dU_mn(t)| with the split
// U_mn = eps_hat dU_mn (m != n).
template <class Real>
EpsilonBoundReport<Real> epsilon_lower_bound(const PropagatorDecomposition<Real>& dec, const FrameSeries<Real>& series,
                                             const Trajectory<Real>& traj, Index n,
                                             const EpsilonBoundOptions& opts = {}) {
    const Index K = series.size(), N = series.levels();
    if (traj.size() != K || static_cast<Index>(dec.Unm.size()) != K) {
        throw std::invalid_argument("epsilon_lower_bound: inputs must share the grid");
    }
    EpsilonBoundReport<Real> rep{series.grid};
    rep.level = n;
    rep.eps_hat = dec.epsilon_hat;
    rep.raw_form = !(dec.epsilon_hat > 0);
    rep.split_convention = rep.raw_form ? "raw: dU_mn = U_mn (eps_hat = 0)" : "dU_mn = U_mn / eps_hat";
    rep.D_eig.resize(K);
    rep.D_state.resize(K);
    rep.denom.resize(K);
    rep.eps_lower.resize(K);
    rep.determinate.assign(static_cast<std::size_t>(K), false);

    const CVector<Real> psi0 = series.state(0, n);
    const Real scale = rep.raw_form ? Real(1) : dec.epsilon_hat;
    for (Index k = 0; k < K; ++k) {
        const CVector<Real> psi = traj[k] * psi0;
        rep.D_eig[k] = min_normed_distance<Real>(psi0, series.state(k, n), Real(1e-8));
        rep.D_state[k] = min_normed_distance<Real>(psi0, psi, Real(1e-8));
        Real s = 0;
        for (Index m = 0; m < N; ++m)
            if (m != n) s += std::abs(dec.Unm[static_cast<std::size_t>(k)](m, n));
        rep.denom[k] = s / scale;
        const bool ok = rep.denom[k] > Real(opts.denom_floor);
        rep.determinate[static_cast<std::size_t>(k)] = ok;
        rep.eps_lower[k] = ok ? (rep.D_eig[k] - rep.D_state[k]) / rep.denom[k]
                              : std::numeric_limits<Real>::quiet_NaN();
    }
    rep.regime = dec.epsilon_hat <= Real(opts.adiabatic_threshold) ? "adiabatic" : "non-adiabatic";
    return rep;
}

// F(t) = |<psi_A(t)|psi_E(t)>|^2 for psi = U(t)|n(0)>.
template <class Real>
RVector<Real> fidelity_adiabatic_vs_exact(const Trajectory<Real>& U_ad, const Trajectory<Real>& U_exact,
                                          const FrameSeries<Real>& series, Index n) {
    const Index K = series.size();
    if (U_ad.size() != K || U_exact.size() != K) {
        throw std::invalid_argument("fidelity_adiabatic_vs_exact: inputs must share the grid");
    }
    const CVector<Real> psi0 = series.state(0, n);
    RVector<Real> F(K);
    for (Index k = 0; k < K; ++k) {
        F[k] = std::norm(CVector<Real>(U_ad[k] * psi0).dot(U_exact[k] * psi0));
    }
    return F;
}

}  // namespace adlab
