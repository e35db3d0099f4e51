#pragma once

// Momentum-space description of the working medium: one decoupled fermionic
// mode per positive momentum, each carrying a 2x2 Bogoliubov block embedded
// in a 4x4 Fock space {|0,0>, |1_k,0>, |0,1_-k>, |1_k,1_-k>}.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ottokz/errors.hpp"

namespace ottokz {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

/// Fock-space indices of the four basis states of one mode.
namespace basis {
inline constexpr int kEmpty = 0;     // |0,0>
inline constexpr int kPlusK = 1;     // |1_k,0>
inline constexpr int kMinusK = 2;    // |0,1_-k>
inline constexpr int kPair = 3;      // |1_k,1_-k>
}  // namespace basis

/// Parameters of one momentum mode: block = diag*sz + offdiag*s+ + conj(offdiag)*s-.
struct ModeHamiltonian {
    double k = 0.0;
    double diag = 0.0;
    Complex offdiag{0.0, 0.0};

    /// 2x2 block acting on {|0,0>, |1_k,1_-k>}.
    [[nodiscard]] Matrix2c block() const {
        Matrix2c m;
        m << Complex(diag, 0.0), offdiag, std::conj(offdiag), Complex(-diag, 0.0);
        return m;
    }

    /// Full 4x4 matrix; the singly occupied states sit at zero energy.
    [[nodiscard]] Matrix4c full() const {
        Matrix4c m = Matrix4c::Zero();
        m(basis::kEmpty, basis::kEmpty) = diag;
        m(basis::kPair, basis::kPair) = -diag;
        m(basis::kEmpty, basis::kPair) = offdiag;
        m(basis::kPair, basis::kEmpty) = std::conj(offdiag);
        return m;
    }
};

/// Universality data entering the Kibble-Zurek exponents.
struct CriticalExponents {
    double nu = 1.0;
    double z = 1.0;
    int d = 1;
    /// 1: the ramp crosses the critical point; 2: the ramp ends on it.
    int x = 1;

    void validate() const {
        if (!(nu > 0.0) || !(z > 0.0) || d < 1 || (x != 1 && x != 2)) {
            throw std::invalid_argument("CriticalExponents: need nu > 0, z > 0, d >= 1, x in {1, 2}");
        }
    }

    /// Transverse-field Ising chain.
    static CriticalExponents ising(int x = 1) { return {1.0, 1.0, 1, x}; }
};

/// Positive momenta k_m = (2m-1)pi/L, m = 1..L/2 (antiperiodic sector).
inline std::vector<double> momentum_grid(int L) {
    if (L < 2 || L % 2 != 0) {
        throw std::invalid_argument("momentum_grid: L must be even and >= 2, got " + std::to_string(L));
    }
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(L / 2));
    for (int m = 1; m <= L / 2; ++m) {
        ks.push_back((2.0 * m - 1.0) * std::numbers::pi / static_cast<double>(L));
    }
    return ks;
}

/// Transverse-field Ising mode at field h (J = 1).
inline ModeHamiltonian tim_mode(double h, double k) {
    return {k, 2.0 * (h + std::cos(k)), Complex(2.0 * std::sin(k), 0.0)};
}

/// Gap between the 4x4 ground level and the next level (= the positive eigenvalue).
inline double gap(const ModeHamiltonian& m) {
    return std::sqrt(m.diag * m.diag + std::norm(m.offdiag));
}

/// Exact many-body ground-state energy of the Ising ring: -sum_k E_k.
inline double ground_state_energy(double h, int L) {
    double e = 0.0;
    for (double k : momentum_grid(L)) {
        e -= gap(tim_mode(h, k));
    }
    return e;
}

}  // namespace ottokz
