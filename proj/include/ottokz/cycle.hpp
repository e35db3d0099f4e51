#pragma once

// Four-stroke Otto cycle over all momentum modes:
//   A -> B  energizing bath at h1
//   B -> C  unitary ramp h1 -> h2 over tau1
//   C -> D  relaxing bath at h2
//   D -> A  unitary ramp h2 -> h1 over tau2

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ottokz/dynamics.hpp"
#include "ottokz/errors.hpp"
#include "ottokz/model.hpp"
#include "ottokz/parallel.hpp"

namespace ottokz {

/// Maps (field, momentum) to a mode Hamiltonian.
using ModeFamily = ModeHamiltonian (*)(double h, double k);

struct CycleRepeat {
    int max_cycles = 10;
    int min_cycles = 1;
    double tol = 1e-10;
};

enum class InitialState { MaximallyMixed, Ground };

struct CycleConfig {
    int L = 100;
    double h1 = 0.0;
    double h2 = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    BathSpec energizing{};
    BathSpec relaxing{};
    DissipativePolicy energizing_policy = ToSteadyState{};
    DissipativePolicy relaxing_policy = ToSteadyState{};
    /// Bath times charged to tau_total under steady-state policies.
    double tau_e_eff = 0.0;
    double tau_r_eff = 0.0;
    CycleRepeat repeat{};
    InitialState initial = InitialState::MaximallyMixed;
    IntegratorControls integrator{};
    FermionSign sign = FermionSign::Minus;
    /// Minimum ground-state population at D for runs that assume a ground-state reset.
    double ground_population_min = 0.999;
    ModeFamily family = &tim_mode;

    void validate() const {
        auto fail = [](const std::string& what) { throw ConfigError("invalid cycle configuration: " + what); };
        if (L < 2 || L % 2 != 0) {
            fail("L must be even and >= 2 (got " + std::to_string(L) + ")");
        }
        if (!std::isfinite(h1) || !std::isfinite(h2)) {
            fail("fields must be finite");
        }
        if (!(h1 > h2)) {
            fail("need h1 > h2");
        }
        if (!(tau1 > 0.0) || !std::isfinite(tau1) || !(tau2 > 0.0) || !std::isfinite(tau2)) {
            fail("tau1 and tau2 must be positive and finite");
        }
        energizing.validate();
        relaxing.validate();
        auto check_policy = [&](const DissipativePolicy& p, const BathSpec& b, const char* name) {
            if (const auto* f = std::get_if<FixedDuration>(&p)) {
                if (!(f->tau >= 0.0) || !std::isfinite(f->tau)) {
                    fail(std::string(name) + " duration must be finite and >= 0");
                }
            } else {
                const auto& s = std::get<ToSteadyState>(p);
                if (!(s.tol > 0.0)) {
                    fail(std::string(name) + " steady-state tolerance must be positive");
                }
                if (b.is_isolated()) {
                    fail(std::string(name) + " bath has all rates zero; no steady state");
                }
            }
        };
        check_policy(energizing_policy, energizing, "energizing");
        check_policy(relaxing_policy, relaxing, "relaxing");
        if (!(tau_e_eff >= 0.0) || !(tau_r_eff >= 0.0)) {
            fail("effective bath times must be >= 0");
        }
        if (repeat.max_cycles < 1 || repeat.min_cycles < 1 || repeat.min_cycles > repeat.max_cycles ||
            !(repeat.tol > 0.0)) {
            fail("cycle repeat needs 1 <= min_cycles <= max_cycles and tol > 0");
        }
        if (!(ground_population_min >= 0.0 && ground_population_min <= 1.0)) {
            fail("ground_population_min must lie in [0, 1]");
        }
        if (family == nullptr) {
            fail("mode family missing");
        }
    }

    [[nodiscard]] double tau_total() const {
        auto bath_time = [](const DissipativePolicy& p, double eff) {
            if (const auto* f = std::get_if<FixedDuration>(&p)) {
                return f->tau;
            }
            return eff;
        };
        return tau1 + tau2 + bath_time(energizing_policy, tau_e_eff) + bath_time(relaxing_policy, tau_r_eff);
    }
};

enum class MachineClass { Engine, Refrigerator, HeatDistributor, Other };

inline std::string_view to_string(MachineClass c) {
    switch (c) {
        case MachineClass::Engine:
            return "engine";
        case MachineClass::Refrigerator:
            return "refrigerator";
        case MachineClass::HeatDistributor:
            return "heat_distributor";
        case MachineClass::Other:
            break;
    }
    return "other";
}

inline MachineClass classify_mode(double q_in, double q_out, double w) {
    if (q_in > 0.0 && q_out < 0.0 && w < 0.0) {
        return MachineClass::Engine;
    }
    if (q_in < 0.0 && q_out > 0.0 && w > 0.0) {
        return MachineClass::Refrigerator;
    }
    if (q_out < 0.0 && w > 0.0) {
        return MachineClass::HeatDistributor;
    }
    return MachineClass::Other;
}

struct ModeRecord {
    double k = 0.0;
    double E_A = 0.0, E_B = 0.0, E_C = 0.0, E_D = 0.0;
    double E_A_ground = 0.0, E_D_ground = 0.0;
    double Q_in = 0.0, Q_out = 0.0, W = 0.0;
    MachineClass cls = MachineClass::Other;
    /// Population of the instantaneous ground state at corner D.
    double ground_population_D = 0.0;
    /// Corner states A, B, C, D.
    std::array<DensityMatrix4, 4> states{};
};

struct CycleTotals {
    double E_A = 0.0, E_B = 0.0, E_C = 0.0, E_D = 0.0;
    double E_A_ground = 0.0, E_D_ground = 0.0;
    double E_ex_A = 0.0;
    double Q_in = 0.0, Q_out = 0.0, W = 0.0;
    /// NaN when Q_in == 0.
    double eta = std::numeric_limits<double>::quiet_NaN();
    double P = 0.0;
    double tau_total = 0.0;
    MachineClass cls = MachineClass::Other;
    std::array<int, 4> class_counts{0, 0, 0, 0};
    double min_ground_population_D = 1.0;
};

struct CycleRecord {
    std::vector<ModeRecord> per_mode;
    CycleTotals totals;
    int cycles_run = 0;
    bool converged = false;
    /// Largest Frobenius change of an A-state over the last cycle.
    double limit_cycle_change = 0.0;
};

namespace detail {

struct ModeCycle {
    DensityMatrix4 a_in;
    ModeRecord rec;
};

inline ModeRecord run_mode_once(const CycleConfig& cfg, double k, const DensityMatrix4& a_in) {
    const ModeHamiltonian m1 = cfg.family(cfg.h1, k);
    const ModeHamiltonian m2 = cfg.family(cfg.h2, k);
    const Matrix4c H1 = m1.full();
    const Matrix4c H2 = m2.full();
    const IntegratorControls& c = cfg.integrator;

    DensityMatrix4 b = evolve_dissipative(a_in, H1, cfg.energizing, cfg.energizing_policy, c, cfg.sign);
    DensityMatrix4 cc = evolve_unitary_ramp(b, m1, m2, cfg.tau1, c);
    DensityMatrix4 d = evolve_dissipative(cc, H2, cfg.relaxing, cfg.relaxing_policy, c, cfg.sign);
    DensityMatrix4 a = evolve_unitary_ramp(d, m2, m1, cfg.tau2, c);

    ModeRecord r;
    r.k = k;
    r.E_A = energy(a, H1);
    r.E_B = energy(b, H1);
    r.E_C = energy(cc, H2);
    r.E_D = energy(d, H2);
    r.E_A_ground = -gap(m1);
    r.E_D_ground = -gap(m2);
    r.Q_in = r.E_B - r.E_A;
    r.Q_out = r.E_D - r.E_C;
    r.W = -(r.Q_in + r.Q_out);
    r.cls = classify_mode(r.Q_in, r.Q_out, r.W);
    const Matrix4c g = DensityMatrix4::ground(m2).matrix();
    r.ground_population_D = (g * d.matrix()).trace().real();
    r.states = {a, b, cc, d};
    return r;
}

inline DensityMatrix4 initial_state(const CycleConfig& cfg, double k) {
    if (cfg.initial == InitialState::Ground) {
        return DensityMatrix4::ground(cfg.family(cfg.h1, k));
    }
    return DensityMatrix4::maximally_mixed();
}

}  // namespace detail

/// Sums per-mode values in ascending k and derives eta, P and the class of the aggregate.
inline CycleTotals aggregate(const std::vector<ModeRecord>& modes, double tau_total) {
    CycleTotals t;
    t.tau_total = tau_total;
    for (const ModeRecord& r : modes) {
        t.E_A += r.E_A;
        t.E_B += r.E_B;
        t.E_C += r.E_C;
        t.E_D += r.E_D;
        t.E_A_ground += r.E_A_ground;
        t.E_D_ground += r.E_D_ground;
        t.Q_in += r.Q_in;
        t.Q_out += r.Q_out;
        t.W += r.W;
        t.class_counts[static_cast<std::size_t>(r.cls)] += 1;
        t.min_ground_population_D = std::min(t.min_ground_population_D, r.ground_population_D);
    }
    t.E_ex_A = t.E_A - t.E_A_ground;
    if (t.Q_in != 0.0) {
        t.eta = -t.W / t.Q_in;
    }
    t.P = t.W / tau_total;
    t.cls = classify_mode(t.Q_in, t.Q_out, t.W);
    return t;
}

/// Runs the cycle for every mode until the A-state repeats (limit cycle).
/// With a steady-state energizing stroke B is independent of A, so one pass is exact.
inline CycleRecord run_cycle(const CycleConfig& cfg, int jobs = 1) {
    cfg.validate();
    const std::vector<double> ks = momentum_grid(cfg.L);
    const std::size_t n = ks.size();

    std::vector<detail::ModeCycle> modes(n);
    for (std::size_t i = 0; i < n; ++i) {
        modes[i].a_in = detail::initial_state(cfg, ks[i]);
    }
    const bool one_pass = std::holds_alternative<ToSteadyState>(cfg.energizing_policy);

    CycleRecord out;
    std::vector<double> change(n, 0.0);
    for (int cycle = 1; cycle <= cfg.repeat.max_cycles; ++cycle) {
        parallel_for(n, jobs, [&](std::size_t i) {
            modes[i].rec = detail::run_mode_once(cfg, ks[i], modes[i].a_in);
            const DensityMatrix4& a_out = modes[i].rec.states[0];
            change[i] = (a_out.matrix() - modes[i].a_in.matrix()).norm();
            modes[i].a_in = a_out;
        });
        out.cycles_run = cycle;
        out.limit_cycle_change = 0.0;
        for (double ch : change) {
            out.limit_cycle_change = std::max(out.limit_cycle_change, ch);
        }
        if (one_pass && cycle >= cfg.repeat.min_cycles) {
            out.converged = true;
            break;
        }
        if (out.limit_cycle_change < cfg.repeat.tol && cycle >= cfg.repeat.min_cycles) {
            out.converged = true;
            break;
        }
    }

    out.per_mode.reserve(n);
    for (auto& m : modes) {
        out.per_mode.push_back(std::move(m.rec));
    }
    out.totals = aggregate(out.per_mode, cfg.tau_total());
    return out;
}

struct EfficiencyPower {
    double eta = 0.0;
    double P = 0.0;
};

/// Efficiency and power from the aggregate flows (never averaged over modes).
inline EfficiencyPower aggregate_efficiency_power(const CycleRecord& rec) {
    const CycleTotals& t = rec.totals;
    if (t.Q_in == 0.0) {
        throw SimulationError("aggregate_efficiency_power: total Q_in is zero");
    }
    if (!(t.tau_total > 0.0)) {
        throw SimulationError("aggregate_efficiency_power: tau_total must be positive");
    }
    return {-t.W / t.Q_in, t.W / t.tau_total};
}

}  // namespace ottokz
