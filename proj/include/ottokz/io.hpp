#pragma once

// Result serialisation: RFC-4180 CSV, JSON documents and the run manifest.
// Requires nlohmann/json (vendor/json.hpp) and OpenSSL libcrypto.

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "ottokz/analysis.hpp"
#include "ottokz/config.hpp"
#include "ottokz/cycle.hpp"
#include "ottokz/errors.hpp"

namespace ottokz {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    static constexpr char digits[] = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(digits[md[i] >> 4]);
        hex.push_back(digits[md[i] & 0xF]);
    }
    return hex;
}

inline std::string config_hash(const RunConfig& rc) { return sha256_hex(rc.canonical); }

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += "\"\"";
        } else {
            out += ch;
        }
    }
    out += '"';
    return out;
}

inline std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            line += ',';
        }
        line += csv_field(fields[i]);
    }
    line += "\r\n";
    return line;
}

/// RFC-4180 parser; returns rows of fields, the first row being the header.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        any = true;
        if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += ch;
        }
    }
    if (quoted) {
        throw FitError("CSV: unterminated quoted field");
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string modes_csv(const CycleRecord& rec) {
    std::string out = csv_row({"k", "E_A", "E_B", "E_C", "E_D", "E_A_ground", "E_D_ground", "Q_in", "Q_out", "W",
                               "class", "ground_population_D"});
    for (const ModeRecord& m : rec.per_mode) {
        out += csv_row({csv_number(m.k), csv_number(m.E_A), csv_number(m.E_B), csv_number(m.E_C), csv_number(m.E_D),
                        csv_number(m.E_A_ground), csv_number(m.E_D_ground), csv_number(m.Q_in),
                        csv_number(m.Q_out), csv_number(m.W), std::string(to_string(m.cls)),
                        csv_number(m.ground_population_D)});
    }
    return out;
}

inline const char* axis_name(SweepAxis a) { return a == SweepAxis::Tau2 ? "tau2" : "h2"; }

inline std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
    std::string out = csv_row(
        {axis_name(axis), "W", "Q_in", "Q_out", "eta", "P", "tau_total", "class", "W_inf", "W_minus_W_inf", "error"});
    for (const SweepRow& r : rows) {
        std::vector<std::string> f{csv_number(r.value)};
        if (r.totals) {
            const CycleTotals& t = *r.totals;
            f.insert(f.end(), {csv_number(t.W), csv_number(t.Q_in), csv_number(t.Q_out), csv_number(t.eta),
                               csv_number(t.P), csv_number(t.tau_total), std::string(to_string(t.cls))});
            f.push_back(r.w_inf ? csv_number(*r.w_inf) : "");
            f.push_back(r.w_inf ? csv_number(t.W - *r.w_inf) : "");
        } else {
            f.insert(f.end(), 9, std::string());
        }
        f.push_back(r.error);
        out += csv_row(f);
    }
    return out;
}

/// Reads (tau2, W) pairs from a sweep CSV; rows with an error or empty W are skipped.
inline std::vector<WorkPoint> work_points_from_csv(std::string_view text) {
    auto rows = parse_csv(text);
    if (rows.empty()) {
        throw FitError("sweep CSV is empty");
    }
    const auto& head = rows.front();
    auto col = [&](const char* name) -> std::size_t {
        for (std::size_t i = 0; i < head.size(); ++i) {
            if (head[i] == name) {
                return i;
            }
        }
        throw FitError(std::string("sweep CSV has no '") + name + "' column");
    };
    const std::size_t ct = col("tau2");
    const std::size_t cw = col("W");
    std::vector<WorkPoint> pts;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) {
            continue;
        }
        if (row.size() != head.size()) {
            throw FitError("sweep CSV row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                           " fields, header has " + std::to_string(head.size()));
        }
        if (row[cw].empty()) {
            continue;
        }
        auto num = [&](const std::string& s) {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
                throw FitError("sweep CSV row " + std::to_string(r + 1) + ": bad number '" + s + "'");
            }
            return v;
        };
        pts.push_back({num(row[ct]), num(row[cw])});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// JSON

using json = nlohmann::ordered_json;

inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const CycleTotals& t) {
    json j;
    j["E_A"] = json_number(t.E_A);
    j["E_B"] = json_number(t.E_B);
    j["E_C"] = json_number(t.E_C);
    j["E_D"] = json_number(t.E_D);
    j["E_A_ground"] = json_number(t.E_A_ground);
    j["E_D_ground"] = json_number(t.E_D_ground);
    j["E_ex_A"] = json_number(t.E_ex_A);
    j["Q_in"] = json_number(t.Q_in);
    j["Q_out"] = json_number(t.Q_out);
    j["W"] = json_number(t.W);
    j["eta"] = json_number(t.eta);
    j["P"] = json_number(t.P);
    j["tau_total"] = json_number(t.tau_total);
    j["class"] = std::string(to_string(t.cls));
    j["mode_classes"] = {{"engine", t.class_counts[0]},
                         {"refrigerator", t.class_counts[1]},
                         {"heat_distributor", t.class_counts[2]},
                         {"other", t.class_counts[3]}};
    j["min_ground_population_D"] = json_number(t.min_ground_population_D);
    return j;
}

inline json to_json(const ScalingFit& f) {
    return {{"exponent", json_number(f.exponent)},
            {"predicted", json_number(f.predicted)},
            {"amplitude", json_number(f.amplitude)},
            {"residual", json_number(f.residual)},
            {"window", {json_number(f.window_min), json_number(f.window_max)}},
            {"points_used", f.points_used}};
}

inline json to_json(const BoundResult& b) {
    json j;
    j["delta_max"] = json_number(b.delta_max);
    j["delta_min"] = json_number(b.delta_min);
    j["delta_min_grid"] = json_number(b.delta_min_grid);
    j["delta_min_scaling"] = b.delta_min_scaling ? json_number(*b.delta_min_scaling) : json(nullptr);
    j["delta_min_source"] = b.delta_min_source;
    j["t_max"] = json_number(b.t_max);
    j["t_min"] = json_number(b.t_min);
    j["eta_max"] = json_number(b.eta_max);
    return j;
}

// ---------------------------------------------------------------------------
// Output files and manifest

struct RunManifest {
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string timestamp;
    std::string command;
    std::vector<std::string> outputs;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

inline json to_json(const RunManifest& m) {
    return {{"config_hash", m.config_hash},
            {"tool_version", m.tool_version},
            {"timestamp", m.timestamp},
            {"command", m.command},
            {"outputs", m.outputs}};
}

}  // namespace ottokz
