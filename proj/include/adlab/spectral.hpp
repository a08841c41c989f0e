// spectral.hpp - gauge-fixed, level-tracked instantaneous eigensystems along a time grid and
// the derivative couplings d[m][n] = <m(t)|dn/dt> built from them.

#pragma once

#include "adlab/errors.hpp"
#include "adlab/models.hpp"
#include "adlab/quadrature.hpp"
#include "adlab/types.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace adlab {

// Gauge conventions stamped on every frame series (and on every gauge-dependent output).
inline constexpr const char* kParallelTransportGauge = "parallel-transport (real positive consecutive overlaps)";
inline constexpr const char* kClosedFormGauge = "closed-form model eigenvectors";

template <class Real>
struct SpectralFrame {
    Real t{};
    RVector<Real> energies;     // level-tracked order
    CMatrix<Real> states;       // column n is |n(t)>
    RVector<Real> gauge_phase;  // phase removed from each raw solver column at this step
};

template <class Real>
struct FrameSeries {
    TimeGrid<Real> grid;
    std::vector<SpectralFrame<Real>> frames;
    std::string gauge;

    Index levels() const { return frames.empty() ? 0 : frames.front().energies.size(); }
    const SpectralFrame<Real>& operator[](Index k) const { return frames[static_cast<std::size_t>(k)]; }
    Index size() const { return static_cast<Index>(frames.size()); }

    CVector<Real> state(Index k, Index n) const { return frames[static_cast<std::size_t>(k)].states.col(n); }
    RVector<Real> energy(Index n) const {
        RVector<Real> e(size());
        for (Index k = 0; k < size(); ++k) e[k] = frames[static_cast<std::size_t>(k)].energies[n];
        return e;
    }
};

template <class Real>
struct CouplingMatrix {
    Real t{};
    CMatrix<Real> d;  // d(m, n) ~ <m(t)|dn/dt>, units 1/time
};

struct SpectralOptions {
    double hermiticity_tol = 1e-12;  // absolute, elementwise
    double degeneracy_rel = 1e-8;    // minimum gap relative to max |E|
};

namespace detail {

// Greedy maximal-overlap assignment: result[i] = column of `candidates` matched to reference i.
template <class Real>
std::vector<Index> match_by_overlap(const CMatrix<Real>& reference, const CMatrix<Real>& candidates) {
    const Index n = reference.cols();
    const RMatrix<Real> ov = (reference.adjoint() * candidates).cwiseAbs();
    std::vector<Index> assignment(static_cast<std::size_t>(n), -1);
    std::vector<bool> used_ref(static_cast<std::size_t>(n), false), used_col(static_cast<std::size_t>(n), false);
    for (Index round = 0; round < n; ++round) {
        Real best = -1;
        Index bi = -1, bj = -1;
        for (Index i = 0; i < n; ++i) {
            if (used_ref[static_cast<std::size_t>(i)]) continue;
            for (Index j = 0; j < n; ++j) {
                if (used_col[static_cast<std::size_t>(j)]) continue;
                if (ov(i, j) > best) {
                    best = ov(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        assignment[static_cast<std::size_t>(bi)] = bj;
        used_ref[static_cast<std::size_t>(bi)] = true;
        used_col[static_cast<std::size_t>(bj)] = true;
    }
    return assignment;
}

template <class Real>
Real min_gap(const RVector<Real>& e) {
    Real gap = std::numeric_limits<Real>::infinity();
    for (Index i = 0; i < e.size(); ++i)
        for (Index j = i + 1; j < e.size(); ++j) gap = std::min(gap, std::abs(e[i] - e[j]));
    return gap;
}

// d/ds Arg<v(t_k)|v(s)> at s = t_k, by second-order differences of the overlap phase
// (central inside, one-sided at the ends). This equals Im<v|v'> for unit vectors, and a
// re-phasing v -> e^{i beta} v shifts it by exactly the central difference of beta.
template <class Real, class At>
Real overlap_phase_rate(At&& at, Index k, Index K, Real dt) {
    const auto f = [&](Index j) { return std::arg(at(k).dot(at(j))); };
    if (k == 0) return (4 * f(1) - f(2)) / (2 * dt);
    if (k == K - 1) return -(4 * f(K - 2) - f(K - 3)) / (2 * dt);
    return (f(k + 1) - f(k - 1)) / (2 * dt);
}

}  // namespace detail

// i int <v|v'> as -sum_{j<k} Arg<v_j|v_{j+1}>. Second order like the trapezoid rule, and a
// re-phasing v_k -> e^{i beta_k} v_k shifts it by exactly -(beta_k - beta_0).
template <class Real, class At>
RVector<Real> discrete_connection_integral(At&& at, Index K) {
    RVector<Real> acc = RVector<Real>::Zero(K);
    for (Index k = 1; k < K; ++k) acc[k] = acc[k - 1] - std::arg(at(k - 1).dot(at(k)));
    return acc;
}

// Rephase each column so <reference_n|n> is real and non-negative. Returns the phases removed.
template <class Real>
RVector<Real> fix_gauge(const CMatrix<Real>& reference, CMatrix<Real>& states) {
    RVector<Real> removed(states.cols());
    for (Index n = 0; n < states.cols(); ++n) {
        const Complex<Real> ov = reference.col(n).dot(states.col(n));  // conjugates the first argument
        const Real a = std::abs(ov) > 0 ? std::arg(ov) : Real(0);
        states.col(n) *= std::polar(Real(1), -a);
        removed[n] = a;
    }
    return removed;
}

// Rephase each column so its first component with magnitude above tol is real positive.
template <class Real>
RVector<Real> fix_gauge_first_component(CMatrix<Real>& states, Real tol = Real(1e-12)) {
    RVector<Real> removed(states.cols());
    for (Index n = 0; n < states.cols(); ++n) {
        Real a = 0;
        for (Index r = 0; r < states.rows(); ++r) {
            if (std::abs(states(r, n)) > tol) {
                a = std::arg(states(r, n));
                break;
            }
        }
        states.col(n) *= std::polar(Real(1), -a);
        removed[n] = a;
    }
    return removed;
}

// Instantaneous eigensystems on `grid`, levels tracked by maximal overlap with the previous frame
// and phases fixed so consecutive same-level overlaps are real positive. Frame 0 follows `ref`
// (columns) when given, otherwise ascending energy with the first-component convention.
template <class Real>
FrameSeries<Real> decompose_tracked(const HamiltonianModel<Real>& model, const TimeGrid<Real>& grid,
                                    const std::optional<CMatrix<Real>>& ref = std::nullopt,
                                    const SpectralOptions& opts = {}) {
    const Index N = model.dimension();
    if (ref && (ref->rows() != N || ref->cols() != N)) {
        throw std::invalid_argument("decompose_tracked: reference basis has wrong shape");
    }
    FrameSeries<Real> series{grid, {}, kParallelTransportGauge};
    series.frames.reserve(static_cast<std::size_t>(grid.size()));

    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(N);
    for (Index k = 0; k < grid.size(); ++k) {
        const Real t = grid[k];
        CMatrix<Real> H = model(t);
        const Real herm = hermiticity_residual(H);
        if (herm > Real(opts.hermiticity_tol)) {
            throw NonHermitianInput(static_cast<double>(t), static_cast<double>(herm));
        }
        H = (H + H.adjoint()) / Real(2);
        solver.compute(H);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("decompose_tracked: eigendecomposition failed");
        }
        const RVector<Real> raw_e = solver.eigenvalues();
        const CMatrix<Real> raw_v = solver.eigenvectors();
        if (N > 1) {
            const Real gap = detail::min_gap(raw_e);
            const Real scale = raw_e.cwiseAbs().maxCoeff();
            if (gap <= Real(opts.degeneracy_rel) * scale || scale == 0) {
                throw DegeneracyDetected(static_cast<double>(t), static_cast<double>(gap));
            }
        }

        SpectralFrame<Real> frame;
        frame.t = t;
        const CMatrix<Real>* previous = nullptr;
        if (k > 0) previous = &series.frames.back().states;
        else if (ref) previous = &*ref;

        if (previous) {
            const auto perm = detail::match_by_overlap(*previous, raw_v);
            frame.energies.resize(N);
            frame.states.resize(N, N);
            for (Index n = 0; n < N; ++n) {
                frame.energies[n] = raw_e[perm[static_cast<std::size_t>(n)]];
                frame.states.col(n) = raw_v.col(perm[static_cast<std::size_t>(n)]);
            }
            frame.gauge_phase = fix_gauge(*previous, frame.states);
        } else {
            frame.energies = raw_e;
            frame.states = raw_v;
            frame.gauge_phase = fix_gauge_first_component(frame.states);
        }
        series.frames.push_back(std::move(frame));
    }
    return series;
}

// Frames straight from a model's closed-form eigensystem hook, no re-gauging.
template <class Real>
FrameSeries<Real> closed_form_frames(const HamiltonianModel<Real>& model, const TimeGrid<Real>& grid) {
    FrameSeries<Real> series{grid, {}, kClosedFormGauge};
    series.frames.reserve(static_cast<std::size_t>(grid.size()));
    for (Index k = 0; k < grid.size(); ++k) {
        const auto es = model.exact_eigensystem(grid[k]);
        SpectralFrame<Real> f{grid[k], es.energies, es.states, RVector<Real>::Zero(es.energies.size())};
        series.frames.push_back(std::move(f));
    }
    return series;
}

// Multiply |n(t_k)> by exp(i beta_n(t_k)). beta(k, n) supplies the phases.
template <class Real, class PhaseFn>
FrameSeries<Real> regauge(FrameSeries<Real> series, PhaseFn&& beta, std::string gauge = "regauged") {
    for (Index k = 0; k < series.size(); ++k) {
        auto& f = series.frames[static_cast<std::size_t>(k)];
        for (Index n = 0; n < f.states.cols(); ++n) {
            const Real b = beta(k, n);
            f.states.col(n) *= std::polar(Real(1), b);
            f.gauge_phase[n] -= b;
        }
    }
    series.gauge = std::move(gauge);
    return series;
}

// sum_k Arg<n(t_k)|n(t_{k+1})>: the Pancharatnam phase accumulated between neighbouring frames.
template <class Real>
RVector<Real> accumulated_pancharatnam(const FrameSeries<Real>& series, Index n) {
    return -discrete_connection_integral<Real>([&](Index k) { return series.state(k, n); }, series.size());
}

// Central differences of the frame states; second-order one-sided stencils at the endpoints.
// The diagonal <n|n'> is taken from the overlap phase instead (same order, purely imaginary,
// and gauge covariant step by step), after the anti-Hermiticity check on the raw differences.
template <class Real>
std::vector<CouplingMatrix<Real>> couplings(const FrameSeries<Real>& series, Real max_antihermitian = Real(1e-3)) {
    const Index K = series.size();
    if (K < 3) throw std::invalid_argument("couplings: need at least 3 frames");
    const Real dt = series.grid.dt();
    std::vector<CouplingMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) {
        CMatrix<Real> deriv;
        if (k == 0) {
            deriv = (Real(-3) * series[0].states + Real(4) * series[1].states - series[2].states) / (2 * dt);
        } else if (k == K - 1) {
            deriv = (Real(3) * series[K - 1].states - Real(4) * series[K - 2].states + series[K - 3].states) / (2 * dt);
        } else {
            deriv = (series[k + 1].states - series[k - 1].states) / (2 * dt);
        }
        CouplingMatrix<Real> c{series[k].t, series[k].states.adjoint() * deriv};
        const Real residual = (c.d + c.d.adjoint()).cwiseAbs().maxCoeff();
        if (residual > max_antihermitian) {
            throw GridTooCoarse("couplings: anti-Hermiticity residual " + std::to_string(static_cast<double>(residual)) +
                                " at t=" + std::to_string(static_cast<double>(c.t)) + "; refine the grid");
        }
        for (Index n = 0; n < c.d.cols(); ++n) {
            const auto col = [&](Index j) { return series[j].states.col(n); };
            c.d(n, n) = Complex<Real>(0, detail::overlap_phase_rate(col, k, K, dt));
        }
        out.push_back(std::move(c));
    }
    return out;
}

template <class Real>
struct AdiabaticityReport {
    std::vector<RMatrix<Real>> ratio;  // ratio[k](m, n) = |d[m][n]| / |E_n - E_m|, zero diagonal
    Real max_ratio{0};
    Real t_at_max{0};
};

template <class Real>
AdiabaticityReport<Real> adiabaticity_ratio(const FrameSeries<Real>& series,
                                            const std::vector<CouplingMatrix<Real>>& coup) {
    if (static_cast<Index>(coup.size()) != series.size()) {
        throw std::invalid_argument("adiabaticity_ratio: frames and couplings differ in length");
    }
    AdiabaticityReport<Real> rep;
    const Index N = series.levels();
    rep.ratio.reserve(coup.size());
    for (Index k = 0; k < series.size(); ++k) {
        const auto& e = series[k].energies;
        RMatrix<Real> r = RMatrix<Real>::Zero(N, N);
        for (Index m = 0; m < N; ++m) {
            for (Index n = 0; n < N; ++n) {
                if (m == n) continue;
                const Real gap = std::abs(e[n] - e[m]);
                if (gap == 0) throw DegeneracyDetected(static_cast<double>(series[k].t), 0.0);
                r(m, n) = std::abs(coup[static_cast<std::size_t>(k)].d(m, n)) / gap;
            }
        }
        const Real mx = r.maxCoeff();
        if (mx > rep.max_ratio) {
            rep.max_ratio = mx;
            rep.t_at_max = series[k].t;
        }
        rep.ratio.push_back(std::move(r));
    }
    return rep;
}

}  // namespace adlab
