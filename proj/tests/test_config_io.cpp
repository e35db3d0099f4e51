#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "ottokz/config.hpp"
#include "ottokz/io.hpp"

using namespace ottokz;

namespace {

const std::string kMinimal = R"([medium]
L = 20
h1 = 70
h2 = -5

[baths]
energizing_mu = 0.995
energizing_mu_prime = 1
relaxing_mu = 1
relaxing_mu_prime = 0

[strokes]
tau1 = 0.01
tau2 = 100
)";

std::string config_path(const char* name) { return std::string(OTTOKZ_CONFIG_DIR) + "/" + name; }

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing

TEST(Config, Minimal) {
    const RunConfig rc = parse_config(kMinimal);
    const CycleConfig& c = rc.cycle;
    EXPECT_EQ(c.L, 20);
    EXPECT_EQ(c.h1, 70.0);
    EXPECT_EQ(c.h2, -5.0);
    EXPECT_EQ(c.energizing.kappa, (std::array<double, 4>{0.995, 1.0, 0.995, 1.0}));
    EXPECT_EQ(c.relaxing.kappa, (std::array<double, 4>{1.0, 0.0, 1.0, 0.0}));
    EXPECT_EQ(c.relaxing.frame, BathSpec::Frame::Occupation);
    EXPECT_TRUE(std::holds_alternative<ToSteadyState>(c.energizing_policy));
    EXPECT_EQ(c.sign, FermionSign::Minus);
    EXPECT_FALSE(rc.sweep.has_value());
}

TEST(Config, ShippedConfigs) {
    const RunConfig f3 = load_config(config_path("fig3_para_para.cfg"));
    EXPECT_EQ(f3.cycle.L, 100);
    EXPECT_EQ(f3.cycle.ground_population_min, 0.97);
    ASSERT_TRUE(f3.sweep);
    EXPECT_EQ(f3.sweep->axis, SweepAxis::Tau2);
    ASSERT_EQ(f3.sweep->grid.size(), 10u);
    EXPECT_EQ(f3.sweep->grid.front(), 50.0);
    EXPECT_EQ(f3.sweep->grid.back(), 2000.0);
    EXPECT_EQ(f3.sweep->exponents.x, 1);

    const RunConfig f4 = load_config(config_path("fig4_para_ferro.cfg"));
    EXPECT_EQ(f4.cycle.relaxing.frame, BathSpec::Frame::Eigenmode);
    const RunConfig f5 = load_config(config_path("fig5_critical_ferro.cfg"));
    EXPECT_EQ(f5.cycle.h1, 0.99);
    EXPECT_EQ(f5.sweep->exponents.x, 2);

    const RunConfig f6 = load_config(config_path("fig6_generalized.cfg"));
    EXPECT_EQ(f6.sweep->axis, SweepAxis::H2);
    ASSERT_EQ(f6.sweep->grid.size(), 14u);
    EXPECT_EQ(f6.sweep->grid[5], 30.0);
    EXPECT_EQ(f6.sweep->grid.back(), 70.0);
}

TEST(Config, ExplicitRatesAndOptions) {
    const RunConfig rc = parse_config(R"(
[medium]
L = 4
h1 = 2   # trailing comment
h2 = 0
[baths]
energizing_kappa = 0.5, 1, 0.5, 1
energizing_frame = occupation
relaxing_mu = 1
relaxing_mu_prime = 0
relaxing_frame = eigenmode
[strokes]
tau1 = 1
tau2 = 2
energizing = fixed
energizing_tau = 3
relaxing_tau_eff = 4
steady_method = evolve
max_cycles = 50
initial_state = ground
[integrator]
fermion_sign = 1
clip_negative_floor = true
step_scale = 0.5
[sweep]
axis = tau2
values = 1, 10, 100
w_inf = -12.5
fit_min = 5
)");
    const CycleConfig& c = rc.cycle;
    EXPECT_EQ(c.h1, 2.0);
    EXPECT_EQ(c.energizing.kappa, (std::array<double, 4>{0.5, 1.0, 0.5, 1.0}));
    EXPECT_EQ(c.relaxing.frame, BathSpec::Frame::Eigenmode);
    ASSERT_TRUE(std::holds_alternative<FixedDuration>(c.energizing_policy));
    EXPECT_EQ(std::get<FixedDuration>(c.energizing_policy).tau, 3.0);
    EXPECT_EQ(std::get<ToSteadyState>(c.relaxing_policy).method, ToSteadyState::Method::Evolve);
    EXPECT_DOUBLE_EQ(c.tau_total(), 1.0 + 2.0 + 3.0 + 4.0);
    EXPECT_EQ(c.repeat.max_cycles, 50);
    EXPECT_EQ(c.initial, InitialState::Ground);
    EXPECT_EQ(c.sign, FermionSign::Plus);
    EXPECT_TRUE(c.integrator.clip_negative_floor);
    EXPECT_EQ(c.integrator.step_scale, 0.5);
    ASSERT_TRUE(rc.sweep);
    EXPECT_EQ(rc.sweep->grid, (std::vector<double>{1, 10, 100}));
    EXPECT_EQ(rc.sweep->w_inf_source, WInfSource::Value);
    EXPECT_EQ(rc.sweep->w_inf_value, -12.5);
    EXPECT_EQ(rc.sweep->window.tau_min, 5.0);
}

TEST(Config, MalformedValueNamesFieldAndLine) {
    std::string text = kMinimal;
    text.replace(text.find("h1 = 70"), 7, "h1 = \"x\"");
    const std::string err = error_of(text);
    EXPECT_NE(err.find("t.cfg:3:"), std::string::npos) << err;
    EXPECT_NE(err.find("medium.h1"), std::string::npos) << err;
    EXPECT_NE(err.find("\"x\""), std::string::npos) << err;
}

TEST(Config, EmptyConfigListsAllMissingKeys) {
    const std::string err = error_of("");
    for (const char* key : {"medium.L", "medium.h1", "medium.h2", "baths.energizing_mu", "baths.energizing_mu_prime",
                            "baths.relaxing_mu", "baths.relaxing_mu_prime", "strokes.tau1", "strokes.tau2"}) {
        EXPECT_NE(err.find(key), std::string::npos) << key << " not in: " << err;
    }
}

TEST(Config, RejectsStructuralErrors) {
    EXPECT_NE(error_of(kMinimal + "bogus = 1\n").find("unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "tau1 = 2\n").find("duplicate key strokes.tau1"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "[extra]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(error_of("L = 2\n" + kMinimal).find("outside any section"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "just text\n").find("expected 'key = value'"), std::string::npos);
}

TEST(Config, RejectsBadValues) {
    auto with = [](const std::string& from, const std::string& to) {
        std::string t = kMinimal;
        t.replace(t.find(from), from.size(), to);
        return error_of(t);
    };
    EXPECT_NE(with("L = 20", "L = 21").find("medium.L"), std::string::npos);
    EXPECT_NE(with("L = 20", "L = 2.5").find("expected an integer"), std::string::npos);
    EXPECT_NE(with("h2 = -5", "h2 = 80").find("h1 > h2"), std::string::npos);
    EXPECT_NE(with("tau2 = 100", "tau2 = 0").find("tau"), std::string::npos);
    EXPECT_NE(with("h2 = -5", "h2 = nan").find("finite number"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "[integrator]\nfermion_sign = 2\n").find("-1 or 1"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "[sweep]\naxis = tau2\nstart = 0\nstop = 10\npoints = 3\n").find("log spacing"),
              std::string::npos);
    EXPECT_NE(error_of(kMinimal + "[sweep]\naxis = tau2\nvalues = 1, x\n").find("sweep.values"), std::string::npos);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError); }

// ---------------------------------------------------------------------------
// Canonical form and hashing

TEST(Hash, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Hash, StableUnderFormattingChanges) {
    const RunConfig a = parse_config(kMinimal);
    std::string reformatted = "# comment\n" + kMinimal;
    reformatted.replace(reformatted.find("h1 = 70"), 7, "h1=70.0   ; seventy");
    const RunConfig b = parse_config(reformatted);
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 64u);

    std::string changed = kMinimal;
    changed.replace(changed.find("tau2 = 100"), 10, "tau2 = 101");
    EXPECT_NE(config_hash(a), config_hash(parse_config(changed)));
}

TEST(Hash, CanonicalTextReparses) {
    const RunConfig rc = load_config(config_path("fig3_para_para.cfg"));
    const RunConfig again = parse_config(rc.canonical);
    EXPECT_EQ(rc.canonical, again.canonical);
}

// ---------------------------------------------------------------------------
// Number formatting and CSV

TEST(Format, RoundTripsDoubles) {
    for (double v : {0.1, -6481.205, 1e-300, 2.0 / 3.0, 123456789.123, 5e-324}) {
        const std::string s = format_double(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
    EXPECT_EQ(format_double(50.0), "50");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Csv, QuotingAndLineEndings) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_row({"a", "b,c", ""}), "a,\"b,c\",\r\n");
    EXPECT_EQ(csv_number(std::numeric_limits<double>::quiet_NaN()), "");
}

TEST(Csv, RoundTrip) {
    const std::vector<std::vector<std::string>> rows{
        {"tau2", "W", "error"}, {"50", "-6400.5", ""}, {"100", "", "line one\nline \"two\", with comma"}};
    std::string text;
    for (const auto& r : rows) {
        text += csv_row(r);
    }
    EXPECT_EQ(parse_csv(text), rows);
    EXPECT_THROW(parse_csv("a,\"unterminated\r\n"), FitError);
}

TEST(Csv, WorkPointsFromSweepCsv) {
    std::vector<SweepRow> rows(3);
    rows[0].value = 50.0;
    rows[0].totals = CycleTotals{};
    rows[0].totals->W = -6000.25;
    rows[0].w_inf = -6481.205;
    rows[1].value = 100.0;
    rows[1].error = "simulation failed, step budget";
    rows[2].value = 200.0;
    rows[2].totals = CycleTotals{};
    rows[2].totals->W = -6300.0;
    const std::string csv = sweep_csv(SweepAxis::Tau2, rows);
    EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "tau2,W,Q_in,Q_out,eta,P,tau_total,class,W_inf,W_minus_W_inf,error");
    const auto pts = work_points_from_csv(csv);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].tau2, 50.0);
    EXPECT_EQ(pts[0].W, -6000.25);
    EXPECT_EQ(pts[1].W, -6300.0);

    const auto parsed = parse_csv(csv);
    EXPECT_EQ(parsed[1][9], format_double(-6000.25 + 6481.205));
    EXPECT_EQ(parsed[2][10], "simulation failed, step budget");
    EXPECT_THROW(work_points_from_csv("h2,W\r\n1,2\r\n"), FitError);
    EXPECT_THROW(work_points_from_csv("tau2,W\r\n1,abc\r\n"), FitError);
}

TEST(Json, NonFiniteBecomesNull) {
    EXPECT_TRUE(json_number(std::numeric_limits<double>::quiet_NaN()).is_null());
    EXPECT_EQ(json_number(-6481.205).dump(), "-6481.205");
    CycleTotals t;
    const json j = to_json(t);
    EXPECT_TRUE(j["eta"].is_null());
    EXPECT_EQ(j["class"], "other");
}
