#pragma once

// Closed-form large-field formulas, W_inf, Kibble-Zurek exponents and fits,
// power optimisation and the gap-based efficiency bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ottokz/cycle.hpp"
#include "ottokz/dynamics.hpp"
#include "ottokz/errors.hpp"
#include "ottokz/model.hpp"
#include "ottokz/parallel.hpp"

namespace ottokz {

// ---------------------------------------------------------------------------
// Large-field closed forms

/// Steady-state occupation probabilities of a mu-bath (loss mu, gain 1) in a field-diagonal mode.
/// p1: both fermions present, p2 = p3: one present, p4: empty.
struct LargeFieldPopulations {
    double p1, p2, p3, p4;
};

inline LargeFieldPopulations large_field_populations(double mu) {
    const double n = (1.0 + mu) * (1.0 + mu);
    return {1.0 / n, mu / n, mu / n, mu * mu / n};
}

struct LargeFieldEnergies {
    double E_B;
    double E_C;
    double E_D_ground_approx;
};

/// Valid for h1 >> 1 and |h2| >> 1 (not enforced).
inline LargeFieldEnergies large_field_energies(int L, double h1, double h2, double mu_E) {
    const double f = (mu_E - 1.0) / (mu_E + 1.0);
    return {L * h1 * f, L * h2 * f, -L * std::abs(h2)};
}

struct GeneralizedEtaPower {
    double eta;
    double P;
};

inline GeneralizedEtaPower generalized_eta_power(int L, double h1, double h2, double mu_E, double mu_R,
                                                 double tau_total) {
    const double alpha = (mu_E - 1.0) / (mu_E + 1.0) - (mu_R - 1.0) / (mu_R + 1.0);
    return {1.0 - h2 / h1, -(L * (h1 - h2) / tau_total) * alpha};
}

// ---------------------------------------------------------------------------
// W_inf

enum class WInfMethod { Analytic, Numeric };

namespace detail {

/// Loss/gain ratio mu = kappa1/kappa2 of a bath using the Ising preset pattern.
inline double preset_mu(const BathSpec& b, const char* name) {
    const auto& k = b.kappa;
    if (k[0] != k[2] || k[1] != k[3] || !(k[1] > 0.0)) {
        throw ConfigError(std::string("analytic W_inf: ") + name +
                          " bath must have kappa1 = kappa3, kappa2 = kappa4 > 0");
    }
    return k[0] / k[1];
}

}  // namespace detail

/// -(E_B - E_A^G + E_D^G - E_C) from the closed-form energies with E_A^G = -L h1; no regime check.
inline double w_infinity_large_field(int L, double h1, double h2, double mu_E) {
    const LargeFieldEnergies a = large_field_energies(L, h1, h2, mu_E);
    return -(a.E_B + L * h1 + a.E_D_ground_approx - a.E_C);
}

/// w_infinity_large_field restricted to h1 > 1, |h2| > 1 and an occupation-frame Ising-preset energizing bath.
/// For h2 < -1 this is -(2L/(1+mu)) (mu h1 - |h2|).
inline double w_infinity_analytic(const CycleConfig& cfg) {
    cfg.validate();
    if (!(cfg.h1 > 1.0 && std::abs(cfg.h2) > 1.0)) {
        throw ConfigError("analytic W_inf: formula applies to h1 > 1 and |h2| > 1 only");
    }
    if (cfg.energizing.frame != BathSpec::Frame::Occupation) {
        throw ConfigError("analytic W_inf: energizing bath must act in the occupation frame");
    }
    return w_infinity_large_field(cfg.L, cfg.h1, cfg.h2, detail::preset_mu(cfg.energizing, "energizing"));
}

struct WInfNumeric {
    double w_inf;
    double E_B, E_C, E_A_ground, E_D_ground;
    double min_ground_population_D;
};

/// W_inf = -(E_B - E_A^G + E_D^G - E_C) from exact steady states and exact ground energies.
/// Throws SimulationError when the relaxing bath leaves any mode below cfg.ground_population_min.
inline WInfNumeric w_infinity_numeric(const CycleConfig& cfg, int jobs = 1) {
    cfg.validate();
    const std::vector<double> ks = momentum_grid(cfg.L);
    struct Row {
        double eb, ec, pop;
    };
    std::vector<Row> rows(ks.size());
    parallel_for(ks.size(), jobs, [&](std::size_t i) {
        const ModeHamiltonian m1 = cfg.family(cfg.h1, ks[i]);
        const ModeHamiltonian m2 = cfg.family(cfg.h2, ks[i]);
        DensityMatrix4 b = steady_state_direct(m1.full(), cfg.energizing, cfg.sign);
        DensityMatrix4 c = evolve_unitary_ramp(b, m1, m2, cfg.tau1, cfg.integrator);
        DensityMatrix4 d = steady_state_direct(m2.full(), cfg.relaxing, cfg.sign);
        const Matrix4c g = DensityMatrix4::ground(m2).matrix();
        rows[i] = {energy(b, m1.full()), energy(c, m2.full()), (g * d.matrix()).trace().real()};
    });
    WInfNumeric out{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        out.E_B += rows[i].eb;
        out.E_C += rows[i].ec;
        out.E_A_ground -= gap(cfg.family(cfg.h1, ks[i]));
        out.E_D_ground -= gap(cfg.family(cfg.h2, ks[i]));
        out.min_ground_population_D = std::min(out.min_ground_population_D, rows[i].pop);
    }
    if (out.min_ground_population_D < cfg.ground_population_min) {
        throw SimulationError("numeric W_inf: relaxing bath leaves ground population " +
                              std::to_string(out.min_ground_population_D) + " < required " +
                              std::to_string(cfg.ground_population_min));
    }
    out.w_inf = -(out.E_B - out.E_A_ground + out.E_D_ground - out.E_C);
    return out;
}

inline double w_infinity(const CycleConfig& cfg, WInfMethod method, int jobs = 1) {
    if (method == WInfMethod::Analytic) {
        return w_infinity_analytic(cfg);
    }
    return w_infinity_numeric(cfg, jobs).w_inf;
}

// ---------------------------------------------------------------------------
// Kibble-Zurek scaling

/// Exponent of W - W_inf in tau2: -nu d/(nu z + 1) when crossing, -nu(d+z)/(nu z + 1) when ending at the QCP.
inline double predicted_work_exponent(const CriticalExponents& e) {
    e.validate();
    const double num = e.x == 2 ? e.nu * (e.d + e.z) : e.nu * e.d;
    return -num / (e.nu * e.z + 1.0);
}

struct ScalingFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double residual = 0.0;
    double window_min = 0.0;
    double window_max = 0.0;
    std::size_t points_used = 0;
    double predicted = 0.0;
};

struct FitWindow {
    /// Explicit tau2 bounds; when absent the excess-energy cutoffs apply.
    std::optional<double> tau_min;
    std::optional<double> tau_max;
    double max_excess_ratio = 0.1;
    double min_excess_ratio = 1e-6;
};

struct WorkPoint {
    double tau2;
    double W;
};

/// OLS of log(W - W_inf) on log(tau2) inside the window.
inline ScalingFit fit_kz_exponent(const std::vector<WorkPoint>& points, double w_inf, const FitWindow& window = {},
                                  const CriticalExponents& e = CriticalExponents::ising()) {
    const double scale = std::abs(w_inf);
    std::vector<std::pair<double, double>> xy;
    for (const WorkPoint& p : points) {
        if (!std::isfinite(p.tau2) || !std::isfinite(p.W) || !(p.tau2 > 0.0)) {
            continue;
        }
        const double excess = p.W - w_inf;
        if (window.tau_min || window.tau_max) {
            if ((window.tau_min && p.tau2 < *window.tau_min) || (window.tau_max && p.tau2 > *window.tau_max)) {
                continue;
            }
            if (!(excess > 0.0)) {
                throw FitError("fit_kz_exponent: non-positive excess energy W - W_inf = " + std::to_string(excess) +
                               " at tau2 = " + std::to_string(p.tau2));
            }
        } else {
            if (!(excess > 0.0) || excess > window.max_excess_ratio * scale ||
                excess < window.min_excess_ratio * scale) {
                continue;
            }
        }
        xy.emplace_back(std::log(p.tau2), std::log(excess));
    }
    if (xy.size() < 5) {
        throw FitError("fit_kz_exponent: need at least 5 points in the fit window, have " +
                       std::to_string(xy.size()));
    }
    const double n = static_cast<double>(xy.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0.0)) {
        throw FitError("fit_kz_exponent: all points share one tau2");
    }
    ScalingFit f;
    f.exponent = sxy / sxx;
    const double intercept = my - f.exponent * mx;
    f.amplitude = std::exp(intercept);
    double ss = 0.0;
    double lo = xy.front().first, hi = xy.front().first;
    for (auto [x, y] : xy) {
        const double r = y - (intercept + f.exponent * x);
        ss += r * r;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    f.residual = std::sqrt(ss / n);
    f.window_min = std::exp(lo);
    f.window_max = std::exp(hi);
    f.points_used = xy.size();
    f.predicted = predicted_work_exponent(e);
    return f;
}

// ---------------------------------------------------------------------------
// Power

inline double power_exponent(const CriticalExponents& e) {
    e.validate();
    return -(e.nu * e.d + e.x * e.nu * e.z + 1.0) / (e.nu * e.z + 1.0);
}

/// P(tau2) = W_inf / tau2 + R tau2^power_exponent.
inline double power_curve(double w_inf, double R, const CriticalExponents& e, double tau2) {
    if (!(tau2 > 0.0)) {
        throw std::invalid_argument("power_curve: tau2 must be positive");
    }
    return w_inf / tau2 + R * std::pow(tau2, power_exponent(e));
}

inline double tau_opt(double w_inf, double R, const CriticalExponents& e) {
    e.validate();
    if (!(R > 0.0) || !(w_inf < 0.0)) {
        throw std::invalid_argument("tau_opt: need R > 0 and W_inf < 0");
    }
    const double denom = e.nu * e.d + (e.x - 1) * e.nu * e.z;
    if (denom == 0.0) {
        throw std::invalid_argument("tau_opt: degenerate exponent denominator");
    }
    const double base = R * (e.nu * e.d + e.x * e.nu * e.z + 1.0) / (std::abs(w_inf) * (e.nu * e.z + 1.0));
    return std::pow(base, (e.nu * e.z + 1.0) / denom);
}

/// Efficiency of a cycle that leaves excess energy E_ex at A: -(W_inf + E_ex) / (E_B - E_A^G - E_ex).
inline double efficiency_with_excess(double E_B, double E_A_ground, double w_inf, double E_ex) {
    return -(w_inf + E_ex) / (E_B - E_A_ground - E_ex);
}

/// Efficiency at tau_opt with E_ex(tau) = R tau^predicted_work_exponent.
inline double eta_at_max_power(double E_B, double E_A_ground, double w_inf, double R, const CriticalExponents& e) {
    const double t = tau_opt(w_inf, R, e);
    return efficiency_with_excess(E_B, E_A_ground, w_inf, R * std::pow(t, predicted_work_exponent(e)));
}

struct Maximum {
    double x;
    double value;
};

/// Maximises f over [lo, hi] on a log axis: coarse grid, then Brent refinement around the best grid point.
inline Maximum maximize_log(const std::function<double(double)>& f, double lo, double hi, int grid = 16,
                            int bits = 30) {
    if (!(lo > 0.0) || !(hi > lo) || grid < 3) {
        throw std::invalid_argument("maximize_log: need 0 < lo < hi and grid >= 3");
    }
    const double a = std::log(lo), b = std::log(hi);
    std::vector<double> xs(static_cast<std::size_t>(grid));
    std::vector<double> vs(xs.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / (grid - 1);
        vs[i] = f(std::exp(xs[i]));
        if (vs[i] > vs[best]) {
            best = i;
        }
    }
    const double l = xs[best == 0 ? 0 : best - 1];
    const double r = xs[std::min(best + 1, xs.size() - 1)];
    auto neg = [&](double u) { return -f(std::exp(u)); };
    auto [u, v] = boost::math::tools::brent_find_minima(neg, l, r, bits);
    if (-v < vs[best]) {
        return {std::exp(xs[best]), vs[best]};
    }
    return {std::exp(u), -v};
}

// ---------------------------------------------------------------------------
// Efficiency bound

struct BoundResult {
    double delta_max = 0.0;
    double delta_min = 0.0;
    double delta_min_grid = 0.0;
    /// (2 pi / L)^z; reported only when h2 sits on a critical field.
    std::optional<double> delta_min_scaling;
    /// "grid" or "scaling": which value delta_min holds.
    std::string delta_min_source = "grid";
    double t_max = 0.0;
    double t_min = 0.0;
    double eta_max = 0.0;
};

/// eta_max = 1 - (Delta_min / Delta_max) ln(k2E/k1E) / ln(k2R/k1R).
inline BoundResult efficiency_bound(const CycleConfig& cfg, const CriticalExponents& e = CriticalExponents::ising()) {
    cfg.validate();
    auto check = [](const BathSpec& b, const char* name) {
        const auto& k = b.kappa;
        if (!(k[1] > k[0] && k[0] > 0.0)) {
            throw ConfigError(std::string("efficiency bound: ") + name +
                              " bath needs gain rate > loss rate > 0 (kappa2 > kappa1 > 0)");
        }
        // kappa1/kappa2 = kappa3/kappa4: equal loss/gain ratio for both fermions.
        const double lhs = k[0] * k[3];
        const double rhs = k[2] * k[1];
        if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs))) {
            throw ConfigError(std::string("efficiency bound: ") + name +
                              " bath must have the same loss/gain ratio on both fermions");
        }
    };
    check(cfg.energizing, "energizing");
    check(cfg.relaxing, "relaxing");

    BoundResult r;
    r.delta_min_grid = std::numeric_limits<double>::infinity();
    for (double k : momentum_grid(cfg.L)) {
        r.delta_max = std::max(r.delta_max, gap(cfg.family(cfg.h1, k)));
        r.delta_min_grid = std::min(r.delta_min_grid, gap(cfg.family(cfg.h2, k)));
    }
    r.delta_min = r.delta_min_grid;
    if (std::abs(std::abs(cfg.h2) - 1.0) < 1e-12) {
        r.delta_min_scaling = std::pow(2.0 * std::numbers::pi / cfg.L, e.z);
        if (*r.delta_min_scaling < r.delta_min_grid) {
            r.delta_min = *r.delta_min_scaling;
            r.delta_min_source = "scaling";
        }
    }
    const double log_e = std::log(cfg.energizing.kappa[1] / cfg.energizing.kappa[0]);
    const double log_r = std::log(cfg.relaxing.kappa[1] / cfg.relaxing.kappa[0]);
    r.t_max = r.delta_max / log_e;
    r.t_min = r.delta_min / log_r;
    r.eta_max = 1.0 - (r.delta_min / r.delta_max) * log_e / log_r;
    return r;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { Tau2, H2 };

struct SweepRow {
    double value = 0.0;
    std::optional<CycleTotals> totals;
    std::optional<double> w_inf;
    std::string error;
};

inline CycleConfig with_axis(CycleConfig cfg, SweepAxis axis, double v) {
    if (axis == SweepAxis::Tau2) {
        cfg.tau2 = v;
    } else {
        cfg.h2 = v;
    }
    return cfg;
}

/// One cycle per grid value; rows come back in grid order. A failing point records its
/// error and the sweep continues. W_inf is attached when the numeric method applies.
inline std::vector<SweepRow> run_sweep(const CycleConfig& base, SweepAxis axis, const std::vector<double>& grid,
                                       int jobs = 1) {
    std::vector<SweepRow> rows(grid.size());
    std::optional<double> shared_w_inf;
    if (axis == SweepAxis::Tau2) {
        try {
            shared_w_inf = w_infinity_numeric(base, jobs).w_inf;
        } catch (const std::exception&) {
            shared_w_inf.reset();
        }
    }
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = grid[i];
        try {
            const CycleConfig cfg = with_axis(base, axis, grid[i]);
            row.totals = run_cycle(cfg, 1).totals;
            if (axis == SweepAxis::Tau2) {
                row.w_inf = shared_w_inf;
            } else {
                try {
                    row.w_inf = w_infinity_numeric(cfg, 1).w_inf;
                } catch (const SimulationError&) {
                    row.w_inf.reset();
                }
            }
        } catch (const std::exception& ex) {
            row.totals.reset();
            row.error = ex.what();
        }
    });
    return rows;
}

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
        throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 1");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// n evenly spaced values from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 1) {
        throw std::invalid_argument("linear_grid: n >= 1");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return g;
}

}  // namespace ottokz
