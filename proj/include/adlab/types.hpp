// types.hpp - dense complex types, uniform time grids and small helpers shared by all modules

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace adlab {

using Index = Eigen::Index;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <class Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
using CMatrix2 = Eigen::Matrix<Complex<Real>, 2, 2>;

// Uniform grid t_k = t0 + k*dt, k = 0..steps. Strictly increasing by construction.
template <class Real>
class TimeGrid {
public:
    TimeGrid(Real t0, Real t_end, Index steps) : t0_(t0), t_end_(t_end), steps_(steps) {
        if (steps < 1) {
            throw std::invalid_argument("TimeGrid: steps must be >= 1");
        }
        if (!(t_end > t0) || !std::isfinite(static_cast<double>(t_end - t0))) {
            throw std::invalid_argument("TimeGrid: t_end must be finite and greater than t0");
        }
        dt_ = (t_end - t0) / static_cast<Real>(steps);
    }

    static TimeGrid from_step(Real t0, Real dt, Index steps) {
        return TimeGrid(t0, t0 + dt * static_cast<Real>(steps), steps);
    }

    Real start() const noexcept { return t0_; }
    Real end() const noexcept { return t_end_; }
    Real dt() const noexcept { return dt_; }
    Index steps() const noexcept { return steps_; }
    Index size() const noexcept { return steps_ + 1; }

    Real operator[](Index k) const noexcept {
        return k == steps_ ? t_end_ : t0_ + static_cast<Real>(k) * dt_;
    }

    // Index of the grid point closest to t.
    Index nearest(Real t) const noexcept {
        const Real x = std::round((t - t0_) / dt_);
        if (x <= 0) return 0;
        if (x >= static_cast<Real>(steps_)) return steps_;
        return static_cast<Index>(x);
    }

    bool operator==(const TimeGrid&) const = default;

private:
    Real t0_;
    Real t_end_;
    Index steps_;
    Real dt_{};
};

template <class Real>
Real hermiticity_residual(const CMatrix<Real>& H) {
    if (H.rows() != H.cols()) {
        throw std::invalid_argument("hermiticity_residual: matrix must be square");
    }
    return (H - H.adjoint()).cwiseAbs().maxCoeff();
}

template <class Real>
Real unitarity_residual(const CMatrix<Real>& U) {
    const CMatrix<Real> I = CMatrix<Real>::Identity(U.rows(), U.cols());
    return (U.adjoint() * U - I).cwiseAbs().maxCoeff();
}

// Continuous unwrapping of a sequence of wrapped angles.
template <class Real>
RVector<Real> unwrap(const RVector<Real>& wrapped) {
    RVector<Real> out(wrapped.size());
    if (wrapped.size() == 0) return out;
    constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;
    out[0] = wrapped[0];
    for (Index k = 1; k < wrapped.size(); ++k) {
        Real step = wrapped[k] - wrapped[k - 1];
        step -= two_pi * std::round(step / two_pi);
        out[k] = out[k - 1] + step;
    }
    return out;
}

// Wrap an angle into (-pi, pi].
template <class Real>
Real wrap_angle(Real a) {
    constexpr Real pi = std::numbers::pi_v<Real>;
    Real w = std::remainder(a, 2 * pi);
    if (w <= -pi) w += 2 * pi;
    return w;
}

}  // namespace adlab
