// models.hpp - time-dependent Hamiltonians: the rotating-field (MS) and Schwinger spin-1/2
// models with their closed forms, plus a generic callable model for user matrices.
//
// Units: hbar = 1, energies and frequencies in rad/time.

#pragma once

#include "adlab/errors.hpp"
#include "adlab/types.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace adlab {

template <class Real>
struct Eigensystem {
    RVector<Real> energies;  // level order as produced by the source, not necessarily sorted
    CMatrix<Real> states;    // eigenvectors as columns
};

// A source of N x N Hermitian matrices H(t). Built-in models also carry closed-form hooks.
template <class Real>
class HamiltonianModel {
public:
    using Matrix = CMatrix<Real>;
    using Evaluator = std::function<Matrix(Real)>;
    using EigenHook = std::function<Eigensystem<Real>(Real)>;
    using PropagatorHook = std::function<Matrix(Real)>;

    HamiltonianModel(Index dimension, Evaluator evaluate, std::string name = "custom")
        : dim_(dimension), evaluate_(std::move(evaluate)), name_(std::move(name)) {
        if (dim_ < 1) {
            throw std::invalid_argument("HamiltonianModel: dimension must be positive");
        }
        if (!evaluate_) {
            throw std::invalid_argument("HamiltonianModel: empty evaluator");
        }
    }

    Index dimension() const noexcept { return dim_; }
    const std::string& name() const noexcept { return name_; }

    Matrix operator()(Real t) const { return evaluate(t); }

    Matrix evaluate(Real t) const {
        Matrix H = evaluate_(t);
        if (H.rows() != dim_ || H.cols() != dim_) {
            throw std::runtime_error("HamiltonianModel '" + name_ + "': evaluator returned wrong shape");
        }
        return H;
    }

    HamiltonianModel& with_eigensystem(EigenHook hook) {
        eigen_hook_ = std::move(hook);
        return *this;
    }
    HamiltonianModel& with_propagator(PropagatorHook hook) {
        propagator_hook_ = std::move(hook);
        return *this;
    }

    bool has_exact_eigensystem() const noexcept { return static_cast<bool>(eigen_hook_); }
    bool has_exact_propagator() const noexcept { return static_cast<bool>(propagator_hook_); }

    Eigensystem<Real> exact_eigensystem(Real t) const {
        if (!eigen_hook_) throw std::logic_error("model '" + name_ + "' has no closed-form eigensystem");
        return eigen_hook_(t);
    }
    Matrix exact_propagator(Real t) const {
        if (!propagator_hook_) throw std::logic_error("model '" + name_ + "' has no closed-form propagator");
        return propagator_hook_(t);
    }

private:
    Index dim_;
    Evaluator evaluate_;
    std::string name_;
    EigenHook eigen_hook_;
    PropagatorHook propagator_hook_;
};

// ---------------------------------------------------------------------------
// Rotating-field model: H(t) = R(t).sigma, field strength omega0, rotation Omega = 2 pi / tau.

template <class Real>
struct MSParams {
    Real omega0{1};  // field strength, rad/time
    Real Omega{0};   // rotation frequency, rad/time

    void validate() const {
        if (!(omega0 > 0)) throw std::invalid_argument("MSParams: omega0 must be > 0");
        if (!std::isfinite(static_cast<double>(Omega))) throw std::invalid_argument("MSParams: Omega must be finite");
    }
    std::optional<Real> period() const {
        if (Omega == 0) return std::nullopt;
        return 2 * std::numbers::pi_v<Real> / std::abs(Omega);
    }
};

template <class Real>
CMatrix2<Real> ms_hamiltonian(const MSParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real diag = p.Omega / 2 * (1 - std::cos(2 * p.omega0 * t));
    const Real s2 = p.Omega / 2 * std::sin(2 * p.omega0 * t);
    CMatrix2<Real> H;
    H(0, 0) = diag;
    H(0, 1) = std::exp(-i * p.Omega * t) * (p.omega0 - i * s2);
    H(1, 0) = std::exp(i * p.Omega * t) * (p.omega0 + i * s2);
    H(1, 1) = -diag;
    return H;
}

template <class Real>
CMatrix2<Real> ms_exact_propagator(const MSParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real c = std::cos(p.omega0 * t);
    const Real s = std::sin(p.omega0 * t);
    CMatrix2<Real> U;
    U(0, 0) = c;
    U(0, 1) = -i * std::exp(-i * p.Omega * t) * s;
    U(1, 0) = -i * std::exp(i * p.Omega * t) * s;
    U(1, 1) = c;
    return U;
}

// E_0(t) = sqrt(omega0^2 + Omega^2 sin^2 omega0 t)
template <class Real>
Real ms_level_energy(const MSParams<Real>& p, Real t) {
    const Real s = std::sin(p.omega0 * t);
    return std::sqrt(p.omega0 * p.omega0 + p.Omega * p.Omega * s * s);
}

// Levels (+E_0, -E_0). theta(t) uses the principal branch of arctan.
template <class Real>
Eigensystem<Real> ms_eigensystem(const MSParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real E0 = ms_level_energy(p, t);
    const Real s = std::sin(p.omega0 * t);
    const Real tilt = std::atan(p.Omega / (2 * p.omega0) * std::sin(2 * p.omega0 * t));
    const C phase = std::exp(-i * (p.Omega * t + tilt) / Real(2));
    const Real big = std::sqrt((E0 + p.Omega * s * s) / (2 * E0));
    const Real small = std::sqrt(std::max(Real(0), E0 - p.Omega * s * s) / (2 * E0));

    Eigensystem<Real> es;
    es.energies.resize(2);
    es.energies << E0, -E0;
    es.states.resize(2, 2);
    es.states(0, 0) = big * phase;
    es.states(1, 0) = small * std::conj(phase);
    es.states(0, 1) = -small * phase;
    es.states(1, 1) = big * std::conj(phase);
    return es;
}

// ---------------------------------------------------------------------------
// Schwinger precession: field of energy b = g mu0 H at fixed polar angle theta, rotating at omega.

template <class Real>
struct SchwingerParams {
    Real b{1};      // g mu0 H, energy units
    Real theta{std::numbers::pi_v<Real> / 2};
    Real omega{0};  // azimuthal rate, phi = omega t
    bool allow_polar_axis{false};

    void validate() const {
        if (!(b > 0)) throw std::invalid_argument("SchwingerParams: b must be > 0");
        if (!std::isfinite(static_cast<double>(omega))) throw std::invalid_argument("SchwingerParams: omega must be finite");
        const Real pi = std::numbers::pi_v<Real>;
        if (allow_polar_axis ? !(theta >= 0 && theta <= pi) : !(theta > 0 && theta < pi)) {
            throw std::invalid_argument("SchwingerParams: theta outside (0, pi)");
        }
    }
};

template <class Real>
CMatrix2<Real> schwinger_hamiltonian(const SchwingerParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real phi = p.omega * t;
    CMatrix2<Real> H;
    H(0, 0) = std::cos(p.theta);
    H(0, 1) = std::sin(p.theta) * std::exp(-i * phi);
    H(1, 0) = std::sin(p.theta) * std::exp(i * phi);
    H(1, 1) = -std::cos(p.theta);
    return -p.b * H;
}

// Levels (n1: +b, n2: -b) in the closed-form gauge
// n1 = (e^{-i phi/2} sin theta/2, -e^{i phi/2} cos theta/2), n2 = (e^{-i phi/2} cos theta/2, e^{i phi/2} sin theta/2).
template <class Real>
Eigensystem<Real> schwinger_eigensystem(const SchwingerParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const C em = std::exp(-i * p.omega * t / Real(2));
    const C ep = std::conj(em);
    const Real s = std::sin(p.theta / 2);
    const Real c = std::cos(p.theta / 2);
    Eigensystem<Real> es;
    es.energies.resize(2);
    es.energies << p.b, -p.b;
    es.states.resize(2, 2);
    es.states(0, 0) = em * s;
    es.states(1, 0) = -ep * c;
    es.states(0, 1) = em * c;
    es.states(1, 1) = ep * s;
    return es;
}

// d[m][n] = <m|dn/dt> for the closed-form eigenvectors (time independent).
template <class Real>
CMatrix2<Real> schwinger_couplings(const SchwingerParams<Real>& p) {
    using C = Complex<Real>;
    const C i(0, 1);
    const C diag = i * p.omega * std::cos(p.theta) / Real(2);
    const C off = -i * p.omega * std::sin(p.theta) / Real(2);
    CMatrix2<Real> d;
    d << diag, off, off, -diag;
    return d;
}

// E~1 = sqrt(b^2 + b omega cos theta + omega^2/4)
template <class Real>
Real schwinger_dressed_frequency(const SchwingerParams<Real>& p, Real tol = Real(1e-12)) {
    const Real sq = p.b * p.b + p.b * p.omega * std::cos(p.theta) + p.omega * p.omega / 4;
    const Real e = std::sqrt(std::max(Real(0), sq));
    if (e < tol) {
        throw DegenerateFrequency("Schwinger dressed frequency vanishes (b cos theta = -omega/2, sin theta = 0)");
    }
    return e;
}

// U_ij(t) = <n_i(t)|U(t)|n_j(0)> exactly, in the closed-form gauge.
template <class Real>
CMatrix2<Real> schwinger_exact_propagator_elements(const SchwingerParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real E = schwinger_dressed_frequency(p);
    const Real detuned = p.b + p.omega / 2 * std::cos(p.theta);
    const C u11 = (E * std::cos(E * t) - i * detuned * std::sin(E * t)) / E;
    const C u21 = i * p.omega * std::sin(p.theta) * std::sin(E * t) / (2 * E);
    CMatrix2<Real> U;
    U << u11, u21, u21, std::conj(u11);
    return U;
}

// Adiabatic approximation to the same elements: U11 = exp(-i t (b + omega/2 cos theta)) and the
// printed off-diagonal U21 = i (omega/2) sin theta sin(t W)/W with W = b + omega/2 cos theta.
template <class Real>
CMatrix2<Real> schwinger_adiabatic_propagator_elements(const SchwingerParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C i(0, 1);
    const Real W = p.b + p.omega / 2 * std::cos(p.theta);
    const C u11 = std::exp(-i * t * W);
    const Real x = t * W;
    const Real sinc_t = std::abs(x) < Real(1e-8) ? t * (1 - x * x / 6) : std::sin(x) / W;
    const C u21 = i * (p.omega / 2) * std::sin(p.theta) * sinc_t;
    CMatrix2<Real> U;
    U << u11, u21, u21, std::conj(u11);
    return U;
}

// ---------------------------------------------------------------------------
// Model factories

template <class Real>
HamiltonianModel<Real> make_ms_model(const MSParams<Real>& p) {
    p.validate();
    HamiltonianModel<Real> m(2, [p](Real t) { return CMatrix<Real>(ms_hamiltonian(p, t)); }, "ms");
    m.with_eigensystem([p](Real t) { return ms_eigensystem(p, t); });
    m.with_propagator([p](Real t) { return CMatrix<Real>(ms_exact_propagator(p, t)); });
    return m;
}

// The closed-form propagator hook is the lab-frame U(t) = sum_ij |n_i(t)> U_ij(t) <n_j(0)|.
template <class Real>
HamiltonianModel<Real> make_schwinger_model(const SchwingerParams<Real>& p) {
    p.validate();
    HamiltonianModel<Real> m(2, [p](Real t) { return CMatrix<Real>(schwinger_hamiltonian(p, t)); },
                             "schwinger");
    m.with_eigensystem([p](Real t) { return schwinger_eigensystem(p, t); });
    m.with_propagator([p](Real t) {
        const auto now = schwinger_eigensystem(p, t).states;
        const auto start = schwinger_eigensystem(p, Real(0)).states;
        return CMatrix<Real>(now * CMatrix<Real>(schwinger_exact_propagator_elements(p, t)) * start.adjoint());
    });
    return m;
}

template <class Real>
HamiltonianModel<Real> make_static_model(const CMatrix<Real>& H, std::string name = "static") {
    if (H.rows() != H.cols()) throw std::invalid_argument("make_static_model: matrix must be square");
    return HamiltonianModel<Real>(H.rows(), [H](Real) { return H; }, std::move(name));
}

}  // namespace adlab
