#pragma once

// Single-mode dynamics: Lindblad dissipative strokes, unitary field ramps and
// direct steady-state solves for the 4x4 mode density matrix.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ottokz/errors.hpp"
#include "ottokz/model.hpp"

namespace ottokz {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;
using Vector4d = Eigen::Vector4d;

/// Tolerances of the DensityMatrix4 invariants.
struct StateTolerance {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    double negativity = 1e-10;
};

/// Orders eigenvalues ascending; `rho` is assumed Hermitian.
inline Vector4d spectrum(const Matrix4c& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Returns an empty string when `rho` is a valid mode state, otherwise the first violation.
inline std::string state_violation(const Matrix4c& rho, const StateTolerance& tol = {}) {
    std::ostringstream os;
    double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= tol.hermiticity)) {
        os << "not Hermitian (max |rho - rho^H| = " << herm << ")";
        return os.str();
    }
    Complex tr = rho.trace();
    if (!(std::abs(tr - 1.0) <= tol.trace)) {
        os << "trace " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i != 1";
        return os.str();
    }
    double lmin = spectrum(0.5 * (rho + rho.adjoint())).minCoeff();
    if (!(lmin >= -tol.negativity)) {
        os << "negative eigenvalue " << lmin;
        return os.str();
    }
    return {};
}

/// 4x4 density matrix of one momentum mode; construction validates the invariants.
class DensityMatrix4 {
public:
    DensityMatrix4() : m_(maximally_mixed().m_) {}

    explicit DensityMatrix4(const Matrix4c& m, const StateTolerance& tol = {}) : m_(m) {
        std::string why = state_violation(m_, tol);
        if (!why.empty()) {
            throw SimulationError("invalid mode density matrix: " + why);
        }
    }

    static DensityMatrix4 maximally_mixed() {
        return DensityMatrix4(Matrix4c::Identity() * 0.25, Unchecked{});
    }

    /// Pure state |psi><psi| (normalised internally).
    static DensityMatrix4 pure(const Eigen::Matrix<Complex, 4, 1>& psi) {
        Eigen::Matrix<Complex, 4, 1> v = psi / psi.norm();
        return DensityMatrix4(v * v.adjoint(), Unchecked{});
    }

    /// Projector onto the 4x4 ground eigenvector of `h`.
    static DensityMatrix4 ground(const ModeHamiltonian& h) {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(h.full());
        return pure(es.eigenvectors().col(0));
    }

    /// Occupation-basis populations (diagonal entries).
    [[nodiscard]] Vector4d populations() const { return m_.diagonal().real(); }

    [[nodiscard]] const Matrix4c& matrix() const { return m_; }

    /// Wraps without checks; used inside integrators between validated points.
    struct Unchecked {};
    DensityMatrix4(const Matrix4c& m, Unchecked) : m_(m) {}

private:
    Matrix4c m_;
};

// ---------------------------------------------------------------------------
// Fermionic operators

/// Jordan-Wigner sign on the second-fermion hop: c_-k = |00><01| + s|10><11|.
enum class FermionSign : int { Minus = -1, Plus = +1 };

struct ModeOperators {
    Matrix4c c_k;
    Matrix4c c_mk;

    static ModeOperators make(FermionSign s = FermionSign::Minus) {
        ModeOperators ops{Matrix4c::Zero(), Matrix4c::Zero()};
        ops.c_k(basis::kEmpty, basis::kPlusK) = 1.0;
        ops.c_k(basis::kMinusK, basis::kPair) = 1.0;
        ops.c_mk(basis::kEmpty, basis::kMinusK) = 1.0;
        ops.c_mk(basis::kPlusK, basis::kPair) = static_cast<double>(static_cast<int>(s));
        return ops;
    }

    /// V c V^+ for each operator.
    [[nodiscard]] ModeOperators rotated(const Matrix4c& v) const {
        return {v * c_k * v.adjoint(), v * c_mk * v.adjoint()};
    }
};

/// Block rotation V with V|0,0> = block ground state and V|1,1> = block excited state of `h`.
/// The phase is fixed so that the larger ground-state component is real and positive.
inline Matrix4c eigenmode_rotation(const Matrix4c& h) {
    Matrix2c block;
    block << h(basis::kEmpty, basis::kEmpty), h(basis::kEmpty, basis::kPair), h(basis::kPair, basis::kEmpty),
        h(basis::kPair, basis::kPair);
    block = 0.5 * (block + block.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(block);
    Eigen::Matrix<Complex, 2, 1> g = es.eigenvectors().col(0);
    const int big = std::abs(g(0)) >= std::abs(g(1)) ? 0 : 1;
    g *= std::abs(g(big)) / g(big);
    Matrix4c v = Matrix4c::Identity();
    v(basis::kEmpty, basis::kEmpty) = g(0);
    v(basis::kPair, basis::kEmpty) = g(1);
    v(basis::kEmpty, basis::kPair) = -std::conj(g(1));
    v(basis::kPair, basis::kPair) = std::conj(g(0));
    return v;
}

// ---------------------------------------------------------------------------
// Baths

/// Lindblad rates on (c_k, c_k^+, c_-k, c_-k^+).
/// Occupation frame: the operators act on the bare fermions.
/// Eigenmode frame: the operators act on the quasiparticles of the stroke Hamiltonian,
/// so pure loss relaxes the mode to its ground state at any field.
struct BathSpec {
    enum class Role { Energizing, Relaxing };
    enum class Frame { Occupation, Eigenmode };

    std::array<double, 4> kappa{0.0, 0.0, 0.0, 0.0};
    Role role = Role::Energizing;
    Frame frame = Frame::Occupation;

    /// Ising preset: loss rate mu and gain rate mu' on both fermions.
    static BathSpec tim(double mu, double mu_prime, Role role, Frame frame = Frame::Occupation) {
        return {{mu, mu_prime, mu, mu_prime}, role, frame};
    }

    [[nodiscard]] double total_rate() const { return kappa[0] + kappa[1] + kappa[2] + kappa[3]; }
    [[nodiscard]] bool is_isolated() const { return total_rate() == 0.0; }

    void validate() const {
        for (double r : kappa) {
            if (!(r >= 0.0) || !std::isfinite(r)) {
                throw ConfigError("bath rates must be finite and non-negative");
            }
        }
    }
};

/// Jump operators of `bath` at stroke Hamiltonian `h`.
inline ModeOperators bath_operators(const Matrix4c& h, const BathSpec& bath, FermionSign s = FermionSign::Minus) {
    ModeOperators ops = ModeOperators::make(s);
    if (bath.frame == BathSpec::Frame::Eigenmode) {
        return ops.rotated(eigenmode_rotation(h));
    }
    return ops;
}

// ---------------------------------------------------------------------------
// Lindblad generator

namespace detail {

inline void add_dissipator(Matrix4c& out, const Matrix4c& rho, const Matrix4c& l, double rate) {
    if (rate == 0.0) {
        return;
    }
    Matrix4c ldag = l.adjoint();
    Matrix4c ldl = ldag * l;
    out.noalias() += rate * (l * rho * ldag);
    out.noalias() -= (0.5 * rate) * (ldl * rho + rho * ldl);
}

}  // namespace detail

/// d rho/dt = -i[H, rho] + sum_j kappa_j D[L_j] rho, with L = (c_k, c_k^+, c_-k, c_-k^+).
inline Matrix4c liouvillian_rhs_unchecked(const Matrix4c& rho, const Matrix4c& h, const BathSpec& bath,
                                          const ModeOperators& ops) {
    const Complex minus_i(0.0, -1.0);
    Matrix4c out = minus_i * (h * rho - rho * h);
    detail::add_dissipator(out, rho, ops.c_k, bath.kappa[0]);
    detail::add_dissipator(out, rho, ops.c_k.adjoint(), bath.kappa[1]);
    detail::add_dissipator(out, rho, ops.c_mk, bath.kappa[2]);
    detail::add_dissipator(out, rho, ops.c_mk.adjoint(), bath.kappa[3]);
    return out;
}

inline Matrix4c liouvillian_rhs(const DensityMatrix4& rho, const Matrix4c& h, const BathSpec& bath,
                                FermionSign s = FermionSign::Minus) {
    const Matrix4c& m = rho.matrix();
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw SimulationError("liouvillian_rhs: density matrix is not Hermitian");
    }
    return liouvillian_rhs_unchecked(m, h, bath, bath_operators(h, bath, s));
}

/// Column-major vectorisation: vec(L rho) = S vec(rho).
inline Matrix16c liouvillian_superoperator(const Matrix4c& h, const BathSpec& bath,
                                           FermionSign s = FermionSign::Minus) {
    const ModeOperators ops = bath_operators(h, bath, s);
    Matrix16c sup;
    for (int col = 0; col < 16; ++col) {
        Matrix4c unit = Matrix4c::Zero();
        unit(col % 4, col / 4) = 1.0;
        Matrix4c image = liouvillian_rhs_unchecked(unit, h, bath, ops);
        sup.col(col) = Eigen::Map<const Vector16c>(image.data());
    }
    return sup;
}

inline DensityMatrix4 normalise_hermitian(const Matrix4c& m) {
    Matrix4c herm = 0.5 * (m + m.adjoint());
    herm /= herm.trace().real();
    return DensityMatrix4(herm, DensityMatrix4::Unchecked{});
}

/// Null vector of the 16x16 Liouvillian, normalised to unit trace.
inline DensityMatrix4 steady_state_direct(const Matrix4c& h, const BathSpec& bath,
                                          FermionSign s = FermionSign::Minus) {
    bath.validate();
    if (bath.is_isolated()) {
        throw SimulationError("steady_state_direct: bath with all rates zero has no unique steady state");
    }
    Matrix16c sup = liouvillian_superoperator(h, bath, s);
    Eigen::JacobiSVD<Matrix16c> svd(sup, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();  // descending
    const double scale = std::max(sv(0), 1.0);
    const double null_tol = 1e-10 * scale;
    int null_dim = 0;
    for (int i = 0; i < 16; ++i) {
        if (sv(i) <= null_tol) {
            ++null_dim;
        }
    }
    if (null_dim > 1) {
        throw SimulationError("steady_state_direct: degenerate steady-state subspace (null-space dimension " +
                              std::to_string(null_dim) + ")");
    }
    Vector16c v = svd.matrixV().col(15);
    Matrix4c rho = Eigen::Map<const Matrix4c>(v.data());
    Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) {
        throw SimulationError("steady_state_direct: null vector is traceless");
    }
    rho /= tr;
    DensityMatrix4 out = normalise_hermitian(rho);
    std::string why = state_violation(out.matrix());
    if (!why.empty()) {
        throw SimulationError("steady_state_direct: " + why);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integrator controls and stroke policies

struct IntegratorControls {
    /// Unitary step: dt = min(tau/min_steps, unitary_phase / Omega_max) * step_scale.
    double unitary_phase = 0.1;
    /// Dissipative step: dt = min(tau/min_steps, dissipative_phase / max(Omega_max, sum kappa)) * step_scale.
    double dissipative_phase = 0.05;
    int min_steps = 1000;
    double step_scale = 1.0;
    /// Step budget for time-evolution steady-state searches.
    std::int64_t max_steps = 50'000'000;
    /// Allow clipping of eigenvalues in [-negativity, 0) with a warning.
    bool clip_negative_floor = false;
    /// Validate state invariants at every stroke boundary.
    bool check_invariants = true;
    StateTolerance tolerance{};
};

struct FixedDuration {
    double tau = 0.0;
};

struct ToSteadyState {
    enum class Method { Direct, Evolve };
    double tol = 1e-10;
    Method method = Method::Direct;
};

using DissipativePolicy = std::variant<FixedDuration, ToSteadyState>;

namespace detail {

inline std::int64_t step_count(double tau, double dt_cap, const IntegratorControls& c) {
    double dt = std::min(tau / c.min_steps, dt_cap) * c.step_scale;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(tau / dt - 1e-9)));
}

/// Checks (and optionally repairs) a state at a stroke boundary.
inline DensityMatrix4 finish_state(const Matrix4c& m, const IntegratorControls& c, const char* stroke) {
    Matrix4c herm = 0.5 * (m + m.adjoint());
    if (!c.check_invariants) {
        return DensityMatrix4(herm, DensityMatrix4::Unchecked{});
    }
    StateTolerance tol = c.tolerance;
    double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > tol.hermiticity) {
        throw SimulationError(std::string(stroke) + ": Hermiticity lost (" + std::to_string(herm_err) + ")");
    }
    if (c.clip_negative_floor) {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(herm);
        Vector4d ev = es.eigenvalues();
        if (ev.minCoeff() < 0.0 && ev.minCoeff() >= -tol.negativity) {
            std::clog << "warning: " << stroke << ": clipping eigenvalue " << ev.minCoeff() << " to 0\n";
            ev = ev.cwiseMax(0.0);
            herm = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
            herm /= herm.trace().real();
        }
    }
    std::string why = state_violation(herm, tol);
    if (!why.empty()) {
        throw SimulationError(std::string(stroke) + ": " + why);
    }
    return DensityMatrix4(herm, DensityMatrix4::Unchecked{});
}

struct Rk4Lindblad {
    const Matrix4c& h;
    const BathSpec& bath;
    ModeOperators ops;

    void step(Matrix4c& rho, double dt) const {
        Matrix4c k1 = liouvillian_rhs_unchecked(rho, h, bath, ops);
        Matrix4c k2 = liouvillian_rhs_unchecked(rho + (0.5 * dt) * k1, h, bath, ops);
        Matrix4c k3 = liouvillian_rhs_unchecked(rho + (0.5 * dt) * k2, h, bath, ops);
        Matrix4c k4 = liouvillian_rhs_unchecked(rho + dt * k3, h, bath, ops);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

inline double spectral_radius(const Matrix4c& h) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Frobenius norm of the Lindblad right-hand side at `rho`.
inline double stationarity_residual(const DensityMatrix4& rho, const Matrix4c& h, const BathSpec& bath,
                                    FermionSign s = FermionSign::Minus) {
    return liouvillian_rhs_unchecked(rho.matrix(), h, bath, bath_operators(h, bath, s)).norm();
}

/// Dissipative stroke at constant Hamiltonian `h`.
inline DensityMatrix4 evolve_dissipative(const DensityMatrix4& rho0, const Matrix4c& h, const BathSpec& bath,
                                         const DissipativePolicy& policy, const IntegratorControls& c = {},
                                         FermionSign s = FermionSign::Minus) {
    bath.validate();
    const double omega = detail::spectral_radius(h);
    const double rate_scale = std::max({omega, bath.total_rate(), 1e-300});

    if (const auto* fixed = std::get_if<FixedDuration>(&policy)) {
        if (!(fixed->tau >= 0.0)) {
            throw SimulationError("evolve_dissipative: negative duration");
        }
        if (fixed->tau == 0.0) {
            return rho0;
        }
        detail::Rk4Lindblad rk{h, bath, bath_operators(h, bath, s)};
        const std::int64_t n = detail::step_count(fixed->tau, c.dissipative_phase / rate_scale, c);
        const double dt = fixed->tau / static_cast<double>(n);
        Matrix4c rho = rho0.matrix();
        for (std::int64_t i = 0; i < n; ++i) {
            rk.step(rho, dt);
        }
        return detail::finish_state(rho, c, "dissipative stroke");
    }

    const auto& ss = std::get<ToSteadyState>(policy);
    if (ss.method == ToSteadyState::Method::Direct) {
        DensityMatrix4 out = steady_state_direct(h, bath, s);
        double res = stationarity_residual(out, h, bath, s);
        if (!(res < ss.tol)) {
            throw SimulationError("evolve_dissipative: direct steady state residual " + std::to_string(res) +
                                  " above tolerance");
        }
        return out;
    }

    if (bath.is_isolated()) {
        throw SimulationError("evolve_dissipative: isolated mode never reaches a steady state");
    }
    detail::Rk4Lindblad rk{h, bath, bath_operators(h, bath, s)};
    const double dt = c.dissipative_phase / rate_scale * c.step_scale;
    const std::int64_t check_every = 256;
    Matrix4c rho = rho0.matrix();
    for (std::int64_t i = 0; i < c.max_steps; i += check_every) {
        for (std::int64_t j = 0; j < check_every; ++j) {
            rk.step(rho, dt);
        }
        if (liouvillian_rhs_unchecked(rho, h, bath, rk.ops).norm() < ss.tol) {
            return detail::finish_state(rho, c, "dissipative stroke");
        }
    }
    std::ostringstream os;
    os << "evolve_dissipative: steady state not reached within " << c.max_steps << " steps (residual "
       << liouvillian_rhs_unchecked(rho, h, bath, rk.ops).norm() << ", tol " << ss.tol << ")";
    throw SimulationError(os.str());
}

// ---------------------------------------------------------------------------
// Unitary ramps

namespace detail {

struct Bloch {
    double x, y, z;
};

/// Pauli-vector of the block d*sz + b s+ + b* s-.
inline Bloch pauli_vector(double diag, Complex offdiag) {
    return {offdiag.real(), -offdiag.imag(), diag};
}

/// Fourth-order Magnus propagator of the linearly ramped 2x2 block.
/// Each step is an exact SU(2) exponential, so the propagator stays unitary.
inline Matrix2c magnus_block_propagator(const ModeHamiltonian& from, const ModeHamiltonian& to, double tau,
                                        std::int64_t steps) {
    const Bloch n0 = pauli_vector(from.diag, from.offdiag);
    const Bloch n1 = pauli_vector(to.diag, to.offdiag);
    const double dt = tau / static_cast<double>(steps);
    const double g1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double g2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double comm = std::sqrt(3.0) / 6.0 * dt * dt;

    auto at = [&](double t) {
        double f = t / tau;
        return Bloch{n0.x + (n1.x - n0.x) * f, n0.y + (n1.y - n0.y) * f, n0.z + (n1.z - n0.z) * f};
    };

    // U = [[a, b], [-conj(b), conj(a)]] tracked as two complex numbers.
    Complex a(1.0, 0.0);
    Complex b(0.0, 0.0);
    for (std::int64_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Bloch p = at(t + g1 * dt);
        const Bloch q = at(t + g2 * dt);
        // m = dt/2 (p + q) + sqrt(3) dt^2 / 6 (q x p); step = exp(-i m.sigma)
        const double mx = 0.5 * dt * (p.x + q.x) + comm * (q.y * p.z - q.z * p.y);
        const double my = 0.5 * dt * (p.y + q.y) + comm * (q.z * p.x - q.x * p.z);
        const double mz = 0.5 * dt * (p.z + q.z) + comm * (q.x * p.y - q.y * p.x);
        const double norm = std::sqrt(mx * mx + my * my + mz * mz);
        double c = 1.0;
        double sn = 0.0;
        if (norm > 0.0) {
            c = std::cos(norm);
            sn = std::sin(norm) / norm;
        }
        // exp(-i m.sigma) = [[c - i sn mz, -i sn (mx - i my)], [-i sn (mx + i my), c + i sn mz]]
        const Complex sa(c, -sn * mz);
        const Complex sb(-sn * my, -sn * mx);
        const Complex na = sa * a - sb * std::conj(b);
        const Complex nb = sa * b + sb * std::conj(a);
        // Renormalise so rounding does not accumulate over long ramps.
        const double inv = 1.0 / std::sqrt(std::norm(na) + std::norm(nb));
        a = na * inv;
        b = nb * inv;
    }
    Matrix2c u;
    u << a, b, -std::conj(b), std::conj(a);
    return u;
}

/// Embeds a block unitary on {|0,0>, |1,1>} into the 4x4 Fock space.
inline Matrix4c embed_block(const Matrix2c& u) {
    Matrix4c full = Matrix4c::Identity();
    full(basis::kEmpty, basis::kEmpty) = u(0, 0);
    full(basis::kEmpty, basis::kPair) = u(0, 1);
    full(basis::kPair, basis::kEmpty) = u(1, 0);
    full(basis::kPair, basis::kPair) = u(1, 1);
    return full;
}

}  // namespace detail

/// Block propagator of a linear ramp between two mode Hamiltonians over time `tau`.
inline Matrix2c ramp_propagator(const ModeHamiltonian& from, const ModeHamiltonian& to, double tau,
                                const IntegratorControls& c = {}) {
    if (!(tau > 0.0)) {
        throw SimulationError("evolve_unitary_ramp: duration must be positive");
    }
    const double omega = std::max({gap(from), gap(to), 1e-300});
    const std::int64_t n = detail::step_count(tau, c.unitary_phase / omega, c);
    return detail::magnus_block_propagator(from, to, tau, n);
}

/// Unitary stroke with the Hamiltonian interpolated linearly from `from` to `to`.
inline DensityMatrix4 evolve_unitary_ramp(const DensityMatrix4& rho0, const ModeHamiltonian& from,
                                          const ModeHamiltonian& to, double tau, const IntegratorControls& c = {}) {
    const Matrix4c u = detail::embed_block(ramp_propagator(from, to, tau, c));
    Matrix4c rho = u * rho0.matrix() * u.adjoint();
    DensityMatrix4 out = detail::finish_state(rho, c, "unitary stroke");
    if (c.check_invariants) {
        double drift = (spectrum(out.matrix()) - spectrum(rho0.matrix())).cwiseAbs().maxCoeff();
        if (drift > 1e-10) {
            throw SimulationError("unitary stroke: spectrum drift " + std::to_string(drift));
        }
    }
    return out;
}

/// Ising ramp h(t) = h_start + (h_end - h_start) t / tau at momentum k.
inline DensityMatrix4 evolve_unitary_ramp(const DensityMatrix4& rho0, double k, double h_start, double h_end,
                                          double tau, const IntegratorControls& c = {}) {
    return evolve_unitary_ramp(rho0, tim_mode(h_start, k), tim_mode(h_end, k), tau, c);
}

/// Mode energy Tr(H rho).
inline double energy(const DensityMatrix4& rho, const Matrix4c& h) {
    Complex e = (h * rho.matrix()).trace();
    if (std::abs(e.imag()) > 1e-10) {
        throw SimulationError("energy: Tr(H rho) has imaginary part " + std::to_string(e.imag()));
    }
    return e.real();
}

}  // namespace ottokz
