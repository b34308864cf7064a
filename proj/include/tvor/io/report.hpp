#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvor/diagnostics.hpp"
#include "tvor/digits.hpp"
#include "tvor/engine.hpp"
#include "tvor/records.hpp"
#include "tvor/simulation.hpp"

namespace tvor::io {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Rounds to 15 significant digits so serialised output does not depend on
/// the last bits of a computation.
inline Json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    const double rounded = std::strtod(buf, nullptr);
    return rounded == 0.0 ? Json(0.0) : Json(rounded);
}

/// Same rounding, as text, for CSV cells.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    if (std::string_view(buf) == "-0") return "0";
    return buf;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

enum class OutputFormat { json, csv };

struct RunConfig {
    FitMode fit_mode = FitMode::raw_ols;
    Count min_size_filter = Dataset::default_min_size;
    double iqr_multiplier = 1.5;
    AgeWindow whipple_window{};
    int reference_year = 1942;
    std::uint64_t rng_seed = 20211;
    OutputFormat output_format = OutputFormat::json;
    double debias_tol = 1e-9;
    int debias_max_iter = 10;
    std::size_t trials = 50;

    Json to_json() const {
        Json j;
        j["fit_mode"] = std::string(to_string(fit_mode));
        j["min_size_filter"] = min_size_filter;
        j["iqr_multiplier"] = number(iqr_multiplier);
        j["whipple_window"] = Json::array({whipple_window.first, whipple_window.last});
        j["reference_year"] = reference_year;
        j["rng_seed"] = rng_seed;
        j["output_format"] = output_format == OutputFormat::json ? "json" : "csv";
        j["debias_tol"] = number(debias_tol);
        j["debias_max_iter"] = debias_max_iter;
        j["trials"] = trials;
        return j;
    }

    /// Overrides fields present in `j`; unknown keys are an error.
    void merge_json(const Json& j) {
        if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "fit_mode") {
                const auto m = parse_fit_mode(value.get<std::string>());
                if (!m) throw InvalidArgument("unknown fit_mode '" + value.get<std::string>() + "'");
                fit_mode = *m;
            } else if (key == "min_size_filter") {
                min_size_filter = value.get<Count>();
            } else if (key == "iqr_multiplier") {
                iqr_multiplier = value.get<double>();
            } else if (key == "whipple_window") {
                if (!value.is_array() || value.size() != 2) throw InvalidArgument("whipple_window must be [first, last]");
                whipple_window = {value[0].get<int>(), value[1].get<int>()};
            } else if (key == "reference_year") {
                reference_year = value.get<int>();
            } else if (key == "rng_seed") {
                rng_seed = value.get<std::uint64_t>();
            } else if (key == "output_format") {
                const auto f = value.get<std::string>();
                if (f != "json" && f != "csv") throw InvalidArgument("output_format must be json or csv");
                output_format = f == "json" ? OutputFormat::json : OutputFormat::csv;
            } else if (key == "debias_tol") {
                debias_tol = value.get<double>();
            } else if (key == "debias_max_iter") {
                debias_max_iter = value.get<int>();
            } else if (key == "trials") {
                trials = value.get<std::size_t>();
            } else {
                throw InvalidArgument("unknown config key '" + key + "'");
            }
        }
    }
};

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error("config '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        base.merge_json(j);
    } catch (const Json::exception& e) {
        throw InvalidArgument("config '" + path + "': " + e.what());
    }
    return base;
}

// ---------------------------------------------------------------------------
// Block serialisers
// ---------------------------------------------------------------------------

inline Json to_json(const TvorModel& m) {
    return Json{{"a", number(m.a)}, {"b", number(m.b)}, {"fit_mode", std::string(to_string(m.fit_mode))},
                {"n_fitted", m.n_fitted}};
}

inline Json to_json(const ScoreRecord& s) {
    return Json{{"rank", s.rank},         {"label", s.label},
                {"N", s.size},            {"dtv", s.dtv},
                {"expected", number(s.expected)}, {"d_signed", number(s.d_signed)},
                {"d_abs", number(s.d_abs)}};
}

inline Json to_json(std::span<const ScoreRecord> scores) {
    Json arr = Json::array();
    for (const auto& s : scores) arr.push_back(to_json(s));
    return arr;
}

inline Json to_json(const RegressionLine& l) {
    return Json{{"slope", number(l.slope)}, {"intercept", number(l.intercept)}, {"r", number(l.r)}, {"n", l.n}};
}

inline Json to_json(const BiasReport& b) {
    return Json{{"convention", std::string(to_string(b.convention))},
                {"correlation", number(b.correlation)},
                {"line", to_json(b.line)}};
}

inline Json to_json(const DebiasResult& d) {
    Json passes = Json::array();
    for (const auto& p : d.passes) passes.push_back(Json{{"a1", number(p.a1)}, {"b1", number(p.b1)}});
    return Json{{"a1", number(d.a1)}, {"b1", number(d.b1)}, {"converged", d.converged}, {"passes", passes}};
}

inline Json to_json(const IqrVerdict& v) {
    return Json{{"q1", number(v.q1)},
                {"q3", number(v.q3)},
                {"iqr", number(v.iqr)},
                {"multiplier", number(v.multiplier)},
                {"upper_fence", number(v.upper_fence)},
                {"quartile_method", "linear interpolation at p*(n-1)"},
                {"outlier_labels", v.outlier_labels}};
}

inline Json to_json(const SweepReport& r) {
    Json arr = Json::array();
    for (const auto& e : r.entries) {
        Json j{{"threshold", e.threshold}, {"included", e.included_count}};
        if (e.top_label) {
            j["top_label"] = *e.top_label;
            j["top_d_abs"] = number(e.top_d_abs);
        } else {
            j["top_label"] = nullptr;
            j["skipped"] = e.skip_reason;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline Json to_json(const DigitProfile& p) {
    Json counts = Json::array();
    for (Count c : p.counts_by_last_digit) counts.push_back(c);
    return Json{{"counts_by_last_digit", counts}, {"total", p.total()}};
}

inline Json to_json(const WhippleResult& w) {
    return Json{{"index", number(w.index)},
                {"classification", std::string(to_string(w.classification))},
                {"ages_in_window", w.ages_in_window},
                {"ages_ending_0_or_5", w.ages_ending_0_or_5}};
}

inline Json to_json(const Histogram& h) {
    Json counts = Json::array();
    for (Count c : h.counts()) counts.push_back(c);
    return Json{{"label", h.label()}, {"origin", h.origin()}, {"N", h.total()}, {"counts", counts}};
}

inline Json to_json(const SubstitutionReport& r) {
    return Json{{"substituted_count", r.substituted_count},
                {"skipped_without_birth_year", r.skipped_without_birth_year},
                {"tie_flagged_ids", r.tie_flagged_ids},
                {"digit_profile_before", to_json(r.digit_profile_before)},
                {"digit_profile_after", to_json(r.digit_profile_after)},
                {"abs_diff_histogram", to_json(r.abs_diff_histogram)}};
}

inline Json to_json(const ChiSquareResult& c) {
    return Json{{"N", c.total}, {"statistic", number(c.statistic)}, {"dof", c.dof}, {"p_value", number(c.p_value)}};
}

inline Json to_json(std::span<const ConvergencePoint> curve) {
    Json arr = Json::array();
    for (const auto& p : curve) {
        arr.push_back(Json{{"N", p.size},
                           {"mean_abs_deviation", number(p.mean_abs_deviation)},
                           {"std_error", number(p.std_error)}});
    }
    return arr;
}

/// Report skeleton shared by every subcommand.
inline Json make_report(std::string_view command, const RunConfig& cfg) {
    Json j;
    j["schema_version"] = schema_version;
    j["command"] = std::string(command);
    j["config"] = cfg.to_json();
    return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tvor::io
