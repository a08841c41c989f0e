// propagation.hpp - exact and adiabatic evolution operators and their decomposition in the
// instantaneous basis, U_nm(t) = <n(t)|U(t)|m(0)>.

#pragma once

#include "adlab/errors.hpp"
#include "adlab/models.hpp"
#include "adlab/quadrature.hpp"
#include "adlab/spectral.hpp"
#include "adlab/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace adlab {

template <class Real>
struct Trajectory {
    TimeGrid<Real> grid;
    std::vector<CMatrix<Real>> U;  // U(t_k) in the fixed t = 0 basis, U[0] = I

    Index size() const { return static_cast<Index>(U.size()); }
    const CMatrix<Real>& operator[](Index k) const { return U[static_cast<std::size_t>(k)]; }

    // psi(t_k) = U(t_k) psi0 for every k.
    std::vector<CVector<Real>> evolve(const CVector<Real>& psi0) const {
        std::vector<CVector<Real>> out;
        out.reserve(U.size());
        for (const auto& u : U) out.push_back(u * psi0);
        return out;
    }
};

enum class Integrator {
    Magnus4,   // commutator-free 4th order: two Hermitian exponentials at the Gauss nodes
    Midpoint,  // exp(-i dt H(t + dt/2)), 2nd order
};

inline Integrator parse_integrator(std::string_view name) {
    if (name == "magnus4") return Integrator::Magnus4;
    if (name == "midpoint") return Integrator::Midpoint;
    throw std::invalid_argument("unknown integrator '" + std::string(name) + "'");
}

inline const char* to_string(Integrator i) { return i == Integrator::Magnus4 ? "magnus4" : "midpoint"; }

struct PropagationOptions {
    Integrator integrator = Integrator::Magnus4;
    double max_phase_per_step = 0.5;  // dt * max|E| guard
    double hermiticity_tol = 1e-12;
};

// exp(-i tau H) for Hermitian H via its eigendecomposition; exactly unitary up to rounding.
// Also reports the spectral radius of H so callers can guard the step size.
template <class Real>
CMatrix<Real> hermitian_exponential(const CMatrix<Real>& H, Real tau, Real* spectral_radius = nullptr) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es((H + H.adjoint()) / Real(2));
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_exponential: eigendecomposition failed");
    const auto& v = es.eigenvectors();
    CVector<Real> ph(es.eigenvalues().size());
    for (Index i = 0; i < ph.size(); ++i) ph[i] = std::polar(Real(1), -tau * es.eigenvalues()[i]);
    if (spectral_radius) *spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    return v * ph.asDiagonal() * v.adjoint();
}

// Largest |eigenvalue| of a Hermitian matrix, i.e. its operator norm.
template <class Real>
Real spectral_radius(const CMatrix<Real>& H) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es((H + H.adjoint()) / Real(2), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <class Real>
Trajectory<Real> propagate_exact(const HamiltonianModel<Real>& model, const TimeGrid<Real>& grid,
                                 const PropagationOptions& opts = {}) {
    const Index N = model.dimension();
    const Real dt = grid.dt();
    Trajectory<Real> traj{grid, {}};
    traj.U.reserve(static_cast<std::size_t>(grid.size()));
    traj.U.push_back(CMatrix<Real>::Identity(N, N));

    auto checked = [&](Real t) {
        CMatrix<Real> H = model(t);
        const Real herm = hermiticity_residual(H);
        if (herm > Real(opts.hermiticity_tol)) throw NonHermitianInput(static_cast<double>(t), static_cast<double>(herm));
        return H;
    };
    auto guard = [&](Real radius, Real t) {
        if (dt * radius > Real(opts.max_phase_per_step)) {
            throw StepTooLarge("propagate_exact: dt*|H| = " + std::to_string(static_cast<double>(dt * radius)) +
                               " exceeds " + std::to_string(opts.max_phase_per_step) +
                               " near t=" + std::to_string(static_cast<double>(t)));
        }
    };

    // Gauss-Legendre nodes and the CF4 weights.
    const Real r3 = std::sqrt(Real(3));
    const Real c1 = Real(0.5) - r3 / 6, c2 = Real(0.5) + r3 / 6;
    const Real a1 = (3 - 2 * r3) / 12, a2 = (3 + 2 * r3) / 12;

    for (Index k = 0; k < grid.steps(); ++k) {
        const Real t = grid[k];
        CMatrix<Real> step;
        if (opts.integrator == Integrator::Midpoint) {
            Real radius = 0;
            step = hermitian_exponential<Real>(checked(t + dt / 2), dt, &radius);
            guard(radius, t);
        } else {
            const CMatrix<Real> H1 = checked(t + c1 * dt);
            const CMatrix<Real> H2 = checked(t + c2 * dt);
            guard(std::max(spectral_radius(H1), spectral_radius(H2)), t);
            step = hermitian_exponential<Real>(a1 * H1 + a2 * H2, dt) * hermitian_exponential<Real>(a2 * H1 + a1 * H2, dt);
        }
        traj.U.push_back(step * traj.U.back());
    }
    return traj;
}

// phi_n(t) = -int E_n + int i<n|n'>, accumulated on the grid; phi_n(0) = 0. Row k, column n.
// With the trapezoid rule the Berry part is the neighbour-overlap sum, as in berry_accumulator.
template <class Real>
RMatrix<Real> adiabatic_phases(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                               Quadrature q = Quadrature::Trapezoid) {
    const Index K = series.size(), N = series.levels();
    if (static_cast<Index>(coup.size()) != K) throw std::invalid_argument("adiabatic_phases: length mismatch");
    RMatrix<Real> phi(K, N);
    for (Index n = 0; n < N; ++n) {
        RVector<Real> rate(K);
        for (Index k = 0; k < K; ++k) {
            rate[k] = -series[k].energies[n];
            if (q != Quadrature::Trapezoid)
                rate[k] += (Complex<Real>(0, 1) * coup[static_cast<std::size_t>(k)].d(n, n)).real();
        }
        phi.col(n) = cumulative_integral(rate, series.grid.dt(), q);
        if (q == Quadrature::Trapezoid) phi.col(n) -= accumulated_pancharatnam(series, n);
    }
    return phi;
}

// U_ad(t) = sum_n exp(i phi_n(t)) |n(t)><n(0)|.
template <class Real>
Trajectory<Real> propagate_adiabatic(const FrameSeries<Real>& series, const std::vector<CouplingMatrix<Real>>& coup,
                                     Quadrature q = Quadrature::Trapezoid) {
    const RMatrix<Real> phi = adiabatic_phases(series, coup, q);
    const CMatrix<Real> start = series[0].states.adjoint();
    Trajectory<Real> traj{series.grid, {}};
    traj.U.reserve(static_cast<std::size_t>(series.size()));
    for (Index k = 0; k < series.size(); ++k) {
        CVector<Real> ph(phi.cols());
        for (Index n = 0; n < phi.cols(); ++n) ph[n] = std::polar(Real(1), phi(k, n));
        traj.U.push_back(series[k].states * ph.asDiagonal() * start);
    }
    return traj;
}

template <class Real>
struct PropagatorDecomposition {
    TimeGrid<Real> grid;
    std::vector<CMatrix<Real>> Unm;  // Unm[k](n, m) = <n(t_k)|U(t_k)|m(0)>
    RMatrix<Real> phi;               // unwrapped Arg U_nn, row k, column n
    std::vector<bool> phi_valid;     // false when |U_nn| < 0.1 somewhere
    RVector<Real> offdiag_norm;      // max_{n != m} |U_nm(t_k)|
    Real epsilon_hat{0};             // max over time of offdiag_norm
    std::string epsilon_convention = "epsilon_hat = max_{k, n != m} |U_nm(t_k)|";
    std::string gauge;

    // Throws PhaseUnwrapAmbiguous for a level whose diagonal element lost dominance.
    RVector<Real> phase(Index n) const {
        if (!phi_valid[static_cast<std::size_t>(n)]) {
            throw PhaseUnwrapAmbiguous("decompose: |U_nn| < 0.1 for level " + std::to_string(n) +
                                       "; diagonal phase is not defined");
        }
        return phi.col(n);
    }
};

template <class Real>
PropagatorDecomposition<Real> decompose(const Trajectory<Real>& traj, const FrameSeries<Real>& series,
                                        Real dominance_floor = Real(0.1)) {
    if (traj.size() != series.size() || !(traj.grid == series.grid)) {
        throw std::invalid_argument("decompose: trajectory and frames must share the grid");
    }
    const Index K = traj.size(), N = series.levels();
    PropagatorDecomposition<Real> dec{series.grid, {}, RMatrix<Real>::Zero(K, N),
                                      std::vector<bool>(static_cast<std::size_t>(N), true),
                                      RVector<Real>::Zero(K), 0};
    dec.gauge = series.gauge;
    dec.Unm.reserve(static_cast<std::size_t>(K));
    const CMatrix<Real>& start = series[0].states;
    for (Index k = 0; k < K; ++k) {
        CMatrix<Real> u = series[k].states.adjoint() * traj[k] * start;
        Real off = 0;
        for (Index n = 0; n < N; ++n) {
            for (Index m = 0; m < N; ++m)
                if (n != m) off = std::max(off, std::abs(u(n, m)));
            if (std::abs(u(n, n)) < dominance_floor) dec.phi_valid[static_cast<std::size_t>(n)] = false;
            if (k == 0) {
                dec.phi(0, n) = std::arg(u(n, n));
            } else {
                const Complex<Real> ratio = u(n, n) * std::conj(dec.Unm.back()(n, n));
                dec.phi(k, n) = dec.phi(k - 1, n) + (std::abs(ratio) > 0 ? std::arg(ratio) : Real(0));
            }
        }
        dec.offdiag_norm[k] = off;
        dec.epsilon_hat = std::max(dec.epsilon_hat, off);
        dec.Unm.push_back(std::move(u));
    }
    return dec;
}

// Residual of i dU_nm/dt - E_n U_nm + sum_p i<n|p'> U_pm = 0 with dU/dt by finite differences.
// The dynamical phase is factored out first, U_nm = exp(-i int E_n) V_nm, and only the slow
// factor V is differenced, so a constant Hamiltonian gives a round-off-level residual.
// Returns max_{n,m} |residual| per grid point.
template <class Real>
RVector<Real> verify_offdiag_ode_residual(const PropagatorDecomposition<Real>& dec, const FrameSeries<Real>& series,
                                          const std::vector<CouplingMatrix<Real>>& coup) {
    const Index K = static_cast<Index>(dec.Unm.size());
    if (K < 3 || series.size() != K || static_cast<Index>(coup.size()) != K) {
        throw std::invalid_argument("verify_offdiag_ode_residual: need >= 3 aligned samples");
    }
    const Index N = series.levels();
    const Real dt = dec.grid.dt();
    const Complex<Real> i(0, 1);

    RMatrix<Real> delta(K, N);
    for (Index n = 0; n < N; ++n) delta.col(n) = cumulative_integral(RVector<Real>(series.energy(n)), dt);
    auto rotor = [&](Index k, Real sign) {
        CVector<Real> r(N);
        for (Index n = 0; n < N; ++n) r[n] = std::polar(Real(1), sign * delta(k, n));
        return r;
    };
    std::vector<CMatrix<Real>> V;
    V.reserve(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) V.push_back(rotor(k, 1).asDiagonal() * dec.Unm[static_cast<std::size_t>(k)]);
    const auto at = [&](Index j) -> const CMatrix<Real>& { return V[static_cast<std::size_t>(j)]; };

    RVector<Real> res(K);
    for (Index k = 0; k < K; ++k) {
        CMatrix<Real> dV;
        if (k == 0) dV = (Real(-3) * at(0) + Real(4) * at(1) - at(2)) / (2 * dt);
        else if (k == K - 1) dV = (Real(3) * at(K - 1) - Real(4) * at(K - 2) + at(K - 3)) / (2 * dt);
        else dV = (at(k + 1) - at(k - 1)) / (2 * dt);
        const CMatrix<Real>& U = dec.Unm[static_cast<std::size_t>(k)];
        // i dU/dt = E U + i exp(-i delta) dV/dt, so the E_n U_nm terms cancel analytically
        const CMatrix<Real> r = i * (rotor(k, -1).asDiagonal() * dV) + i * coup[static_cast<std::size_t>(k)].d * U;
        res[k] = r.cwiseAbs().maxCoeff();
    }
    return res;
}

}  // namespace adlab
