#pragma once

// INI-style run configuration: sections [medium], [baths], [strokes],
// [integrator], [sweep]. Unknown sections and keys are errors. All keys are
// listed in docs/config.md.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ottokz/analysis.hpp"
#include "ottokz/cycle.hpp"
#include "ottokz/errors.hpp"

namespace ottokz {

enum class WInfSource { Numeric, Analytic, Value };

struct SweepSpec {
    SweepAxis axis = SweepAxis::Tau2;
    std::vector<double> grid;
    CriticalExponents exponents{};
    WInfSource w_inf_source = WInfSource::Numeric;
    double w_inf_value = 0.0;
    FitWindow window{};
};

struct RunConfig {
    CycleConfig cycle;
    std::optional<SweepSpec> sweep;
    /// Fully resolved configuration in canonical text form (input to the config hash).
    std::string canonical;
};

/// Locale-independent formatting with 17 significant digits.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    int line = 0;
};

enum class Kind { Number, Integer, Word, List, Bool };

struct KeySpec {
    const char* section;
    const char* key;
    Kind kind;
};

// clang-format off
inline constexpr KeySpec kKeys[] = {
    {"medium", "L", Kind::Integer},
    {"medium", "h1", Kind::Number},
    {"medium", "h2", Kind::Number},
    {"medium", "model", Kind::Word},

    {"baths", "energizing_mu", Kind::Number},
    {"baths", "energizing_mu_prime", Kind::Number},
    {"baths", "energizing_kappa", Kind::List},
    {"baths", "energizing_frame", Kind::Word},
    {"baths", "relaxing_mu", Kind::Number},
    {"baths", "relaxing_mu_prime", Kind::Number},
    {"baths", "relaxing_kappa", Kind::List},
    {"baths", "relaxing_frame", Kind::Word},
    {"baths", "ground_population_min", Kind::Number},

    {"strokes", "tau1", Kind::Number},
    {"strokes", "tau2", Kind::Number},
    {"strokes", "energizing", Kind::Word},
    {"strokes", "energizing_tau", Kind::Number},
    {"strokes", "energizing_tau_eff", Kind::Number},
    {"strokes", "relaxing", Kind::Word},
    {"strokes", "relaxing_tau", Kind::Number},
    {"strokes", "relaxing_tau_eff", Kind::Number},
    {"strokes", "steady_method", Kind::Word},
    {"strokes", "steady_tol", Kind::Number},
    {"strokes", "max_cycles", Kind::Integer},
    {"strokes", "min_cycles", Kind::Integer},
    {"strokes", "cycle_tol", Kind::Number},
    {"strokes", "initial_state", Kind::Word},

    {"integrator", "unitary_phase", Kind::Number},
    {"integrator", "dissipative_phase", Kind::Number},
    {"integrator", "min_steps", Kind::Integer},
    {"integrator", "step_scale", Kind::Number},
    {"integrator", "max_steps", Kind::Number},
    {"integrator", "clip_negative_floor", Kind::Bool},
    {"integrator", "check_invariants", Kind::Bool},
    {"integrator", "fermion_sign", Kind::Integer},

    {"sweep", "axis", Kind::Word},
    {"sweep", "start", Kind::Number},
    {"sweep", "stop", Kind::Number},
    {"sweep", "points", Kind::Integer},
    {"sweep", "step", Kind::Number},
    {"sweep", "spacing", Kind::Word},
    {"sweep", "values", Kind::List},
    {"sweep", "nu", Kind::Number},
    {"sweep", "z", Kind::Number},
    {"sweep", "d", Kind::Integer},
    {"sweep", "x", Kind::Integer},
    {"sweep", "w_inf", Kind::Word},
    {"sweep", "fit_min", Kind::Number},
    {"sweep", "fit_max", Kind::Number},
    {"sweep", "max_excess_ratio", Kind::Number},
    {"sweep", "min_excess_ratio", Kind::Number},
};
// clang-format on

inline const KeySpec* find_key(const std::string& section, const std::string& key) {
    for (const KeySpec& k : kKeys) {
        if (section == k.section && key == k.key) {
            return &k;
        }
    }
    return nullptr;
}

inline bool known_section(const std::string& s) {
    return s == "medium" || s == "baths" || s == "strokes" || s == "integrator" || s == "sweep";
}

/// Collects every problem so one run reports them all.
class Resolver {
public:
    Resolver(std::map<std::string, Entry> entries, std::string origin)
        : entries_(std::move(entries)), origin_(std::move(origin)) {}

    bool has(const std::string& id) const { return entries_.count(id) != 0; }

    std::optional<double> number(const std::string& id, bool required) {
        auto e = get(id, required);
        if (!e) {
            return std::nullopt;
        }
        double v = 0.0;
        const std::string& s = e->value;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
            bad(id, *e, "expected a finite number, got '" + s + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const std::string& id, bool required) {
        auto e = get(id, required);
        if (!e) {
            return std::nullopt;
        }
        long long v = 0;
        const std::string& s = e->value;
        const char* first = s.data();
        if (!s.empty() && s[0] == '+') {
            ++first;
        }
        auto res = std::from_chars(first, s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            bad(id, *e, "expected an integer, got '" + s + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> word(const std::string& id, bool required, std::initializer_list<const char*> allowed) {
        auto e = get(id, required);
        if (!e) {
            return std::nullopt;
        }
        for (const char* a : allowed) {
            if (e->value == a) {
                return e->value;
            }
        }
        std::string list;
        for (const char* a : allowed) {
            list += list.empty() ? "" : "|";
            list += a;
        }
        bad(id, *e, "expected one of " + list + ", got '" + e->value + "'");
        return std::nullopt;
    }

    std::optional<std::string> raw(const std::string& id) {
        auto e = get(id, false);
        if (!e) {
            return std::nullopt;
        }
        return e->value;
    }

    std::optional<bool> boolean(const std::string& id) {
        auto e = get(id, false);
        if (!e) {
            return std::nullopt;
        }
        if (e->value == "true" || e->value == "1") {
            return true;
        }
        if (e->value == "false" || e->value == "0") {
            return false;
        }
        bad(id, *e, "expected true or false, got '" + e->value + "'");
        return std::nullopt;
    }

    std::optional<std::vector<double>> list(const std::string& id, bool required) {
        auto e = get(id, required);
        if (!e) {
            return std::nullopt;
        }
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::string t = trim(item);
            double v = 0.0;
            auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
                bad(id, *e, "expected a comma-separated list of numbers, got '" + e->value + "'");
                return std::nullopt;
            }
            out.push_back(v);
        }
        if (out.empty()) {
            bad(id, *e, "empty list");
            return std::nullopt;
        }
        return out;
    }

    void missing(const std::string& id) { missing_.push_back(id); }

    void invalid(const std::string& id, const std::string& why) {
        auto it = entries_.find(id);
        if (it != entries_.end()) {
            bad(id, it->second, why);
        } else {
            errors_.push_back(origin_ + ": " + id + ": " + why);
        }
    }

    void add_error(std::string msg) { errors_.push_back(std::move(msg)); }

    void finish() const {
        if (missing_.empty() && errors_.empty()) {
            return;
        }
        std::string msg;
        if (!missing_.empty()) {
            msg += origin_ + ": missing required keys:";
            for (const std::string& m : missing_) {
                msg += " " + m;
            }
        }
        for (const std::string& e : errors_) {
            msg += (msg.empty() ? "" : "\n") + e;
        }
        throw ConfigError(msg);
    }

private:
    std::optional<Entry> get(const std::string& id, bool required) {
        auto it = entries_.find(id);
        if (it == entries_.end()) {
            if (required) {
                missing_.push_back(id);
            }
            return std::nullopt;
        }
        return it->second;
    }

    void bad(const std::string& id, const Entry& e, const std::string& why) {
        errors_.push_back(origin_ + ":" + std::to_string(e.line) + ": " + id + ": " + why);
    }

    std::map<std::string, Entry> entries_;
    std::string origin_;
    std::vector<std::string> missing_;
    std::vector<std::string> errors_;
};

inline BathSpec::Frame parse_frame(const std::optional<std::string>& w) {
    return w && *w == "eigenmode" ? BathSpec::Frame::Eigenmode : BathSpec::Frame::Occupation;
}

inline std::optional<BathSpec> resolve_bath(Resolver& r, const std::string& name, BathSpec::Role role) {
    const std::string pre = "baths." + name;
    auto frame = parse_frame(r.word(pre + "_frame", false, {"occupation", "eigenmode"}));
    if (r.has(pre + "_kappa")) {
        if (r.has(pre + "_mu") || r.has(pre + "_mu_prime")) {
            r.invalid(pre + "_kappa", "give either " + name + "_kappa or " + name + "_mu/" + name +
                                          "_mu_prime, not both");
            return std::nullopt;
        }
        auto k = r.list(pre + "_kappa", true);
        if (!k) {
            return std::nullopt;
        }
        if (k->size() != 4) {
            r.invalid(pre + "_kappa", "expected four rates kappa1..kappa4");
            return std::nullopt;
        }
        BathSpec b{{(*k)[0], (*k)[1], (*k)[2], (*k)[3]}, role, frame};
        return b;
    }
    auto mu = r.number(pre + "_mu", true);
    auto mup = r.number(pre + "_mu_prime", true);
    if (!mu || !mup) {
        return std::nullopt;
    }
    return BathSpec::tim(*mu, *mup, role, frame);
}

inline std::string canonical_text(const RunConfig& rc) {
    const CycleConfig& c = rc.cycle;
    std::ostringstream os;
    auto f = format_double;
    auto bath = [&](const char* name, const BathSpec& b) {
        os << name << "_kappa=" << f(b.kappa[0]) << "," << f(b.kappa[1]) << "," << f(b.kappa[2]) << ","
           << f(b.kappa[3]) << "\n";
        os << name << "_frame=" << (b.frame == BathSpec::Frame::Eigenmode ? "eigenmode" : "occupation") << "\n";
    };
    auto policy = [&](const char* name, const DissipativePolicy& p, double eff) {
        if (const auto* fx = std::get_if<FixedDuration>(&p)) {
            os << name << "=fixed\n" << name << "_tau=" << f(fx->tau) << "\n";
        } else {
            os << name << "=steady\n" << name << "_tau_eff=" << f(eff) << "\n";
        }
    };
    // Both steady strokes share one method and tolerance.
    auto steady = [&]() {
        for (const DissipativePolicy* p : {&c.energizing_policy, &c.relaxing_policy}) {
            if (const auto* s = std::get_if<ToSteadyState>(p)) {
                return *s;
            }
        }
        return ToSteadyState{};
    }();
    os << "[medium]\nL=" << c.L << "\nh1=" << f(c.h1) << "\nh2=" << f(c.h2) << "\nmodel=tim\n";
    os << "[baths]\n";
    bath("energizing", c.energizing);
    bath("relaxing", c.relaxing);
    os << "ground_population_min=" << f(c.ground_population_min) << "\n";
    os << "[strokes]\ntau1=" << f(c.tau1) << "\ntau2=" << f(c.tau2) << "\n";
    policy("energizing", c.energizing_policy, c.tau_e_eff);
    policy("relaxing", c.relaxing_policy, c.tau_r_eff);
    os << "steady_method=" << (steady.method == ToSteadyState::Method::Evolve ? "evolve" : "direct")
       << "\nsteady_tol=" << f(steady.tol) << "\n";
    os << "max_cycles=" << c.repeat.max_cycles << "\nmin_cycles=" << c.repeat.min_cycles
       << "\ncycle_tol=" << f(c.repeat.tol)
       << "\ninitial_state=" << (c.initial == InitialState::Ground ? "ground" : "mixed") << "\n";
    const IntegratorControls& ic = c.integrator;
    os << "[integrator]\nunitary_phase=" << f(ic.unitary_phase) << "\ndissipative_phase=" << f(ic.dissipative_phase)
       << "\nmin_steps=" << ic.min_steps << "\nstep_scale=" << f(ic.step_scale) << "\nmax_steps=" << ic.max_steps
       << "\nclip_negative_floor=" << (ic.clip_negative_floor ? "true" : "false")
       << "\ncheck_invariants=" << (ic.check_invariants ? "true" : "false")
       << "\nfermion_sign=" << static_cast<int>(c.sign) << "\n";
    if (rc.sweep) {
        const SweepSpec& s = *rc.sweep;
        os << "[sweep]\naxis=" << (s.axis == SweepAxis::Tau2 ? "tau2" : "h2") << "\nvalues=";
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            os << (i ? "," : "") << f(s.grid[i]);
        }
        os << "\nnu=" << f(s.exponents.nu) << "\nz=" << f(s.exponents.z) << "\nd=" << s.exponents.d
           << "\nx=" << s.exponents.x << "\nw_inf=";
        switch (s.w_inf_source) {
            case WInfSource::Numeric:
                os << "numeric";
                break;
            case WInfSource::Analytic:
                os << "analytic";
                break;
            case WInfSource::Value:
                os << f(s.w_inf_value);
                break;
        }
        os << "\n";
        if (s.window.tau_min) {
            os << "fit_min=" << f(*s.window.tau_min) << "\n";
        }
        if (s.window.tau_max) {
            os << "fit_max=" << f(*s.window.tau_max) << "\n";
        }
        os << "max_excess_ratio=" << f(s.window.max_excess_ratio)
           << "\nmin_excess_ratio=" << f(s.window.min_excess_ratio) << "\n";
    }
    return os.str();
}

}  // namespace detail

/// Parses configuration text. `origin` prefixes diagnostics (usually the file name).
inline RunConfig parse_config(std::string_view text, const std::string& origin = "config") {
    std::map<std::string, detail::Entry> entries;
    std::vector<std::string> errors;
    std::string section;
    bool saw_sweep = false;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') {
            continue;
        }
        auto where = origin + ":" + std::to_string(lineno) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']') {
                errors.push_back(where + "malformed section header '" + t + "'");
                continue;
            }
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            if (!detail::known_section(section)) {
                errors.push_back(where + "unknown section [" + section + "]");
            }
            saw_sweep = saw_sweep || section == "sweep";
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + "expected 'key = value', got '" + t + "'");
            continue;
        }
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        // Trailing comments start at ' #' or ' ;'.
        for (std::string_view mark : {" #", "\t#", " ;", "\t;"}) {
            auto pos = value.find(mark);
            if (pos != std::string::npos) {
                value = detail::trim(std::string_view(value).substr(0, pos));
            }
        }
        if (section.empty()) {
            errors.push_back(where + "key '" + key + "' outside any section");
            continue;
        }
        if (!detail::known_section(section)) {
            continue;
        }
        if (detail::find_key(section, key) == nullptr) {
            errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        std::string id = section + "." + key;
        if (entries.count(id) != 0) {
            errors.push_back(where + "duplicate key " + id + " (first set on line " +
                             std::to_string(entries[id].line) + ")");
            continue;
        }
        if (value.empty()) {
            errors.push_back(where + id + ": empty value");
            continue;
        }
        entries[id] = {value, lineno};
    }

    detail::Resolver r(std::move(entries), origin);
    for (auto& e : errors) {
        r.add_error(e);
    }

    RunConfig rc;
    CycleConfig& c = rc.cycle;
    if (auto v = r.integer("medium.L", true)) {
        if (*v < 2 || *v % 2 != 0 || *v > 1'000'000) {
            r.invalid("medium.L", "must be even, >= 2 and <= 1000000");
        } else {
            c.L = static_cast<int>(*v);
        }
    }
    if (auto v = r.number("medium.h1", true)) c.h1 = *v;
    if (auto v = r.number("medium.h2", true)) c.h2 = *v;
    r.word("medium.model", false, {"tim"});

    if (auto b = detail::resolve_bath(r, "energizing", BathSpec::Role::Energizing)) c.energizing = *b;
    if (auto b = detail::resolve_bath(r, "relaxing", BathSpec::Role::Relaxing)) c.relaxing = *b;
    if (auto v = r.number("baths.ground_population_min", false)) c.ground_population_min = *v;

    if (auto v = r.number("strokes.tau1", true)) c.tau1 = *v;
    if (auto v = r.number("strokes.tau2", true)) c.tau2 = *v;
    ToSteadyState steady{};
    if (auto w = r.word("strokes.steady_method", false, {"direct", "evolve"})) {
        steady.method = *w == "evolve" ? ToSteadyState::Method::Evolve : ToSteadyState::Method::Direct;
    }
    if (auto v = r.number("strokes.steady_tol", false)) steady.tol = *v;
    auto policy = [&](const std::string& name, double& eff) -> DissipativePolicy {
        auto w = r.word("strokes." + name, false, {"steady", "fixed"});
        if (w && *w == "fixed") {
            auto tau = r.number("strokes." + name + "_tau", true);
            if (r.has("strokes." + name + "_tau_eff")) {
                r.invalid("strokes." + name + "_tau_eff", "only meaningful for steady-state strokes");
            }
            return FixedDuration{tau.value_or(0.0)};
        }
        if (r.has("strokes." + name + "_tau")) {
            r.invalid("strokes." + name + "_tau", "only meaningful for fixed-duration strokes");
        }
        if (auto v = r.number("strokes." + name + "_tau_eff", false)) eff = *v;
        return steady;
    };
    c.energizing_policy = policy("energizing", c.tau_e_eff);
    c.relaxing_policy = policy("relaxing", c.tau_r_eff);
    if (auto v = r.integer("strokes.max_cycles", false)) c.repeat.max_cycles = static_cast<int>(*v);
    if (auto v = r.integer("strokes.min_cycles", false)) c.repeat.min_cycles = static_cast<int>(*v);
    if (auto v = r.number("strokes.cycle_tol", false)) c.repeat.tol = *v;
    if (auto w = r.word("strokes.initial_state", false, {"mixed", "ground"})) {
        c.initial = *w == "ground" ? InitialState::Ground : InitialState::MaximallyMixed;
    }

    IntegratorControls& ic = c.integrator;
    if (auto v = r.number("integrator.unitary_phase", false)) ic.unitary_phase = *v;
    if (auto v = r.number("integrator.dissipative_phase", false)) ic.dissipative_phase = *v;
    if (auto v = r.integer("integrator.min_steps", false)) ic.min_steps = static_cast<int>(*v);
    if (auto v = r.number("integrator.step_scale", false)) ic.step_scale = *v;
    if (auto v = r.number("integrator.max_steps", false)) ic.max_steps = static_cast<std::int64_t>(*v);
    if (auto v = r.boolean("integrator.clip_negative_floor")) ic.clip_negative_floor = *v;
    if (auto v = r.boolean("integrator.check_invariants")) ic.check_invariants = *v;
    if (auto v = r.integer("integrator.fermion_sign", false)) {
        if (*v == 1 || *v == -1) {
            c.sign = *v == 1 ? FermionSign::Plus : FermionSign::Minus;
        } else {
            r.invalid("integrator.fermion_sign", "must be -1 or 1");
        }
    }
    if (!(ic.unitary_phase > 0.0) || !(ic.dissipative_phase > 0.0) || ic.min_steps < 1 || !(ic.step_scale > 0.0) ||
        ic.max_steps < 1) {
        r.add_error(origin + ": [integrator] phases, min_steps, step_scale and max_steps must be positive");
    }

    if (saw_sweep) {
        SweepSpec s;
        auto axis = r.word("sweep.axis", true, {"tau2", "h2"});
        s.axis = axis && *axis == "h2" ? SweepAxis::H2 : SweepAxis::Tau2;
        if (r.has("sweep.values")) {
            if (auto v = r.list("sweep.values", true)) s.grid = *v;
            for (const char* k : {"sweep.start", "sweep.stop", "sweep.points", "sweep.step", "sweep.spacing"}) {
                if (r.has(k)) r.invalid(k, "not allowed together with sweep.values");
            }
        } else {
            auto start = r.number("sweep.start", true);
            auto stop = r.number("sweep.stop", true);
            auto spacing = r.word("sweep.spacing", false, {"log", "linear"});
            bool log = spacing ? *spacing == "log" : s.axis == SweepAxis::Tau2;
            std::optional<long long> points;
            if (r.has("sweep.step")) {
                if (r.has("sweep.points")) r.invalid("sweep.step", "give either points or step");
                auto step = r.number("sweep.step", true);
                if (step && start && stop) {
                    if (log || !(*step > 0.0) || *stop < *start) {
                        r.invalid("sweep.step", "step needs linear spacing, step > 0 and stop >= start");
                    } else {
                        points = static_cast<long long>(std::floor((*stop - *start) / *step + 1e-9)) + 1;
                    }
                }
            } else {
                points = r.integer("sweep.points", true);
            }
            if (start && stop && points) {
                if (*points < 2) {
                    r.invalid("sweep.points", "a sweep grid needs at least 2 points");
                } else if (log && !(*start > 0.0 && *stop > *start)) {
                    r.invalid("sweep.start", "log spacing needs 0 < start < stop");
                } else if (!log && r.has("sweep.step")) {
                    double step = *r.number("sweep.step", true);
                    for (long long i = 0; i < *points; ++i) s.grid.push_back(*start + step * static_cast<double>(i));
                } else {
                    s.grid = log ? log_grid(*start, *stop, static_cast<int>(*points))
                                 : linear_grid(*start, *stop, static_cast<int>(*points));
                }
            }
        }
        if (auto v = r.number("sweep.nu", false)) s.exponents.nu = *v;
        if (auto v = r.number("sweep.z", false)) s.exponents.z = *v;
        if (auto v = r.integer("sweep.d", false)) s.exponents.d = static_cast<int>(*v);
        if (auto v = r.integer("sweep.x", false)) s.exponents.x = static_cast<int>(*v);
        try {
            s.exponents.validate();
        } catch (const std::invalid_argument& ex) {
            r.add_error(origin + ": [sweep] " + ex.what());
        }
        if (auto w = r.raw("sweep.w_inf")) {
            if (*w == "numeric") {
                s.w_inf_source = WInfSource::Numeric;
            } else if (*w == "analytic") {
                s.w_inf_source = WInfSource::Analytic;
            } else {
                s.w_inf_source = WInfSource::Value;
                if (auto v = r.number("sweep.w_inf", true)) {
                    s.w_inf_value = *v;
                }
            }
        }
        if (auto v = r.number("sweep.fit_min", false)) s.window.tau_min = *v;
        if (auto v = r.number("sweep.fit_max", false)) s.window.tau_max = *v;
        if (auto v = r.number("sweep.max_excess_ratio", false)) s.window.max_excess_ratio = *v;
        if (auto v = r.number("sweep.min_excess_ratio", false)) s.window.min_excess_ratio = *v;
        rc.sweep = std::move(s);
    }

    r.finish();
    try {
        c.validate();
    } catch (const ConfigError& ex) {
        throw ConfigError(origin + ": " + ex.what());
    }
    rc.canonical = detail::canonical_text(rc);
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace ottokz
