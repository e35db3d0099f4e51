// ottokz: command-line front end for Otto-cycle runs, sweeps, scaling fits and bounds.
//
//   ottokz run|sweep|fit|bound --config FILE [--out DIR] [--jobs N] [--assert --tol X]
//
// Exit codes: 0 ok, 2 configuration error, 3 simulation error, 4 fit error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ottokz/analysis.hpp"
#include "ottokz/config.hpp"
#include "ottokz/cycle.hpp"
#include "ottokz/io.hpp"

namespace fs = std::filesystem;
using namespace ottokz;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitFit = 4;

struct Options {
    std::string config;
    std::string out = "out";
    int jobs = 0;
    bool do_assert = false;
    double tol = 0.05;
    std::string csv;
};

void finish(const Options& opt, const RunConfig& rc, const std::string& command, std::vector<std::string> outputs) {
    RunManifest m;
    m.config_hash = config_hash(rc);
    m.timestamp = utc_timestamp();
    m.command = command;
    outputs.push_back((fs::path(opt.out) / "manifest.json").string());
    m.outputs = std::move(outputs);
    write_file(fs::path(opt.out) / "manifest.json", to_json(m).dump(2) + "\n");
}

json header(const RunConfig& rc) {
    const CycleConfig& c = rc.cycle;
    return {{"config_hash", config_hash(rc)},
            {"L", c.L},
            {"h1", c.h1},
            {"h2", c.h2},
            {"tau1", c.tau1},
            {"tau2", c.tau2}};
}

int cmd_run(const Options& opt) {
    const RunConfig rc = load_config(opt.config);
    const int jobs = resolve_jobs(opt.jobs);
    const CycleRecord rec = run_cycle(rc.cycle, jobs);

    json j = header(rc);
    j["cycles_run"] = rec.cycles_run;
    j["converged"] = rec.converged;
    j["limit_cycle_change"] = json_number(rec.limit_cycle_change);
    j["totals"] = to_json(rec.totals);
    try {
        j["W_inf_numeric"] = json_number(w_infinity_numeric(rc.cycle, jobs).w_inf);
    } catch (const SimulationError& ex) {
        j["W_inf_numeric"] = nullptr;
        j["W_inf_note"] = ex.what();
    }

    const fs::path dir(opt.out);
    write_file(dir / "run.json", j.dump(2) + "\n");
    write_file(dir / "modes.csv", modes_csv(rec));
    finish(opt, rc, "run", {(dir / "run.json").string(), (dir / "modes.csv").string()});

    const CycleTotals& t = rec.totals;
    std::cout << "W = " << format_double(t.W) << "\neta = " << format_double(t.eta)
              << "\nP = " << format_double(t.P) << "\nclass = " << to_string(t.cls) << "\n";
    if (!rec.converged) {
        std::cerr << "warning: limit cycle not reached after " << rec.cycles_run << " cycles (change "
                  << rec.limit_cycle_change << ")\n";
    }
    return 0;
}

const SweepSpec& need_sweep(const RunConfig& rc) {
    if (!rc.sweep) {
        throw ConfigError("configuration has no [sweep] section");
    }
    return *rc.sweep;
}

int cmd_sweep(const Options& opt) {
    const RunConfig rc = load_config(opt.config);
    const SweepSpec& s = need_sweep(rc);
    const std::vector<SweepRow> rows = run_sweep(rc.cycle, s.axis, s.grid, resolve_jobs(opt.jobs));

    const fs::path dir(opt.out);
    write_file(dir / "sweep.csv", sweep_csv(s.axis, rows));
    finish(opt, rc, "sweep", {(dir / "sweep.csv").string()});

    int failed = 0;
    for (const SweepRow& r : rows) {
        if (!r.error.empty()) {
            ++failed;
            std::cerr << "warning: " << axis_name(s.axis) << " = " << format_double(r.value) << ": " << r.error
                      << "\n";
        }
    }
    std::cout << rows.size() << " points, " << failed << " failed -> " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_fit(const Options& opt) {
    const RunConfig rc = load_config(opt.config);
    const SweepSpec spec = rc.sweep.value_or(SweepSpec{});
    const int jobs = resolve_jobs(opt.jobs);
    const fs::path dir(opt.out);
    const fs::path csv_path = opt.csv.empty() ? dir / "sweep.csv" : fs::path(opt.csv);

    std::ifstream f(csv_path, std::ios::binary);
    if (!f) {
        throw FitError("cannot read sweep CSV '" + csv_path.string() + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    const std::vector<WorkPoint> points = work_points_from_csv(ss.str());

    std::optional<WInfNumeric> numeric;
    try {
        numeric = w_infinity_numeric(rc.cycle, jobs);
    } catch (const SimulationError&) {
        if (spec.w_inf_source == WInfSource::Numeric) {
            throw;
        }
    }
    double w_inf = 0.0;
    const char* source = "numeric";
    switch (spec.w_inf_source) {
        case WInfSource::Numeric:
            w_inf = numeric->w_inf;
            break;
        case WInfSource::Analytic:
            w_inf = w_infinity_analytic(rc.cycle);
            source = "analytic";
            break;
        case WInfSource::Value:
            w_inf = spec.w_inf_value;
            source = "value";
            break;
    }

    const ScalingFit fit = fit_kz_exponent(points, w_inf, spec.window, spec.exponents);
    json j = header(rc);
    j["W_inf"] = json_number(w_inf);
    j["W_inf_source"] = source;
    j["exponents"] = {{"nu", spec.exponents.nu}, {"z", spec.exponents.z}, {"d", spec.exponents.d},
                      {"x", spec.exponents.x}};
    j["fit"] = to_json(fit);
    if (w_inf < 0.0 && fit.amplitude > 0.0) {
        j["tau_opt"] = json_number(tau_opt(w_inf, fit.amplitude, spec.exponents));
        if (numeric) {
            j["eta_at_max_power"] =
                json_number(eta_at_max_power(numeric->E_B, numeric->E_A_ground, w_inf, fit.amplitude, spec.exponents));
        }
    }
    const double deviation = std::abs(fit.exponent - fit.predicted);
    j["deviation"] = json_number(deviation);
    if (opt.do_assert) {
        j["assert_tol"] = opt.tol;
        j["assert_pass"] = deviation <= opt.tol;
    }
    write_file(dir / "fit.json", j.dump(2) + "\n");
    finish(opt, rc, "fit", {(dir / "fit.json").string()});

    std::cout << "exponent = " << format_double(fit.exponent) << " (predicted " << format_double(fit.predicted)
              << ", " << fit.points_used << " points in [" << format_double(fit.window_min) << ", "
              << format_double(fit.window_max) << "])\n";
    if (opt.do_assert && !(deviation <= opt.tol)) {
        std::cerr << "error: |fitted - predicted| = " << deviation << " exceeds tolerance " << opt.tol << "\n";
        return kExitFit;
    }
    return 0;
}

int cmd_bound(const Options& opt) {
    const RunConfig rc = load_config(opt.config);
    const CriticalExponents e = rc.sweep ? rc.sweep->exponents : CriticalExponents::ising();
    const BoundResult b = efficiency_bound(rc.cycle, e);
    json j = header(rc);
    j["bound"] = to_json(b);
    const fs::path dir(opt.out);
    write_file(dir / "bound.json", j.dump(2) + "\n");
    finish(opt, rc, "bound", {(dir / "bound.json").string()});
    std::cout << "eta_max = " << format_double(b.eta_max) << " (Delta_min " << format_double(b.delta_min) << " from "
              << b.delta_min_source << ", Delta_max " << format_double(b.delta_max) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Many-body quantum Otto cycle simulator"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--jobs", opt.jobs, "worker threads (default: OTTOKZ_JOBS, else all cores)")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* run = app.add_subcommand("run", "run one cycle; writes run.json and modes.csv");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep tau2 or h2; writes sweep.csv");
    CLI::App* fit = app.add_subcommand("fit", "fit the work-scaling exponent to a sweep; writes fit.json");
    CLI::App* bound = app.add_subcommand("bound", "evaluate the efficiency bound; writes bound.json");
    for (CLI::App* sub : {run, sweep, fit, bound}) {
        common(sub);
    }
    fit->add_option("--csv", opt.csv, "sweep CSV (default OUT/sweep.csv)");
    CLI::Option* assert_flag = fit->add_flag("--assert", opt.do_assert, "fail unless |fitted - predicted| <= tol");
    fit->add_option("--tol", opt.tol, "tolerance for --assert")->capture_default_str()->needs(assert_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(opt);
        if (*sweep) return cmd_sweep(opt);
        if (*fit) return cmd_fit(opt);
        if (*bound) return cmd_bound(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
