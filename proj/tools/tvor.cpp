// tvor: command-line front end for the histogram smoothness-outlier toolkit.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvor/io/csv.hpp"
#include "tvor/io/plot.hpp"
#include "tvor/io/report.hpp"
#include "tvor/tvor.hpp"

namespace {

using tvor::Count;
using tvor::io::Json;
using tvor::io::number;

// Usage problems detected after CLI11 parsing (missing input and the like).
class UsageError : public tvor::Error {
public:
    using tvor::Error::Error;
};

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string fit_mode;
    std::optional<Count> min_size;
    std::optional<double> iqr_multiplier;
    std::optional<int> reference_year;
    std::string window;
    std::optional<std::size_t> trials;
    std::string plot_path;
    std::string plot_kind;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config_path, "JSON file with run configuration");
    sub->add_option("--seed", o.seed, "RNG seed (falls back to TVOR_SEED, then the config file)");
    sub->add_option("--out", o.out, "Output path (default: stdout)");
    sub->add_option("--format", o.format, "Report format: json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--fit-mode", o.fit_mode, "raw_ols or normalized_ols")
        ->check(CLI::IsMember({"raw_ols", "normalized_ols", "raw", "normalized"}));
    sub->add_option("--min-size", o.min_size, "Drop histograms with fewer elements (default 100)");
    sub->add_option("--iqr-multiplier", o.iqr_multiplier, "IQR fence multiplier k (default 1.5)");
    sub->add_option("--reference-year", o.reference_year, "Year used to turn birth years into ages");
    sub->add_option("--window", o.window, "Whipple age window FIRST,LAST (default 23,62)");
    sub->add_option("--trials", o.trials, "Monte Carlo trials per size");
    sub->add_option("--plot-data", o.plot_path, "Also write plot data (.svg for SVG, otherwise CSV)");
    sub->add_option("--plot-kind", o.plot_kind, "dtv-vs-n, digit-profile, sweep or gc-curve")
        ->check(CLI::IsMember({"dtv-vs-n", "digit-profile", "sweep", "gc-curve"}));
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

tvor::io::RunConfig effective_config(const CommonOptions& o) {
    tvor::io::RunConfig cfg;
    if (!o.config_path.empty()) cfg = tvor::io::load_config(o.config_path, cfg);
    if (o.seed) {
        cfg.rng_seed = *o.seed;
    } else if (const char* env = std::getenv("TVOR_SEED"); env && *env) {
        const auto s = tvor::io::parse_integer<std::uint64_t>(env);
        if (!s) throw UsageError(std::string("TVOR_SEED='") + env + "' is not an unsigned integer");
        cfg.rng_seed = *s;
    }
    if (!o.format.empty()) {
        cfg.output_format = o.format == "csv" ? tvor::io::OutputFormat::csv : tvor::io::OutputFormat::json;
    }
    if (!o.fit_mode.empty()) cfg.fit_mode = *tvor::parse_fit_mode(o.fit_mode);
    if (o.min_size) cfg.min_size_filter = *o.min_size;
    if (o.iqr_multiplier) cfg.iqr_multiplier = *o.iqr_multiplier;
    if (o.reference_year) cfg.reference_year = *o.reference_year;
    if (o.trials) cfg.trials = *o.trials;
    if (!o.window.empty()) {
        const auto parts = split_list(o.window);
        const auto first = parts.size() == 2 ? tvor::io::parse_integer<int>(parts[0]) : std::nullopt;
        const auto last = parts.size() == 2 ? tvor::io::parse_integer<int>(parts[1]) : std::nullopt;
        if (!first || !last) throw UsageError("--window expects FIRST,LAST");
        cfg.whipple_window = {*first, *last};
    }
    if (cfg.min_size_filter < 1) throw UsageError("min_size_filter must be at least 1");
    return cfg;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return tvor::io::csv_escape(v.get<std::string>());
    if (v.is_number_float()) return tvor::io::format_number(v.get<double>());
    if (v.is_number() || v.is_boolean()) return v.dump();
    return tvor::io::csv_escape(v.dump());
}

/// Config echo as comment lines, then the report's main block as a table.
std::string render_csv(const Json& report, const std::string& table_block) {
    std::ostringstream out;
    out << "# schema_version=" << report["schema_version"].get<int>() << '\n';
    out << "# command=" << report["command"].get<std::string>() << '\n';
    for (const auto& [k, v] : report["config"].items()) out << "# config." << k << '=' << csv_cell(v) << '\n';
    Json rows = report.contains(table_block) ? report[table_block] : Json::array();
    if (rows.is_object()) rows = Json::array({rows});
    if (rows.empty()) return out.str();
    bool first = true;
    for (const auto& [k, v] : rows[0].items()) {
        out << (first ? "" : ",") << k;
        first = false;
    }
    out << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [k, v] : rows[0].items()) {
            out << (first ? "" : ",") << (row.contains(k) ? csv_cell(row[k]) : "");
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw tvor::Error("failed to write report to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw tvor::Error("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw tvor::Error("failed writing '" + path + "'");
}

void emit(const Json& report, const std::string& table_block, const tvor::io::RunConfig& cfg,
          const CommonOptions& o, std::optional<tvor::io::PlotKind> default_plot = std::nullopt) {
    if (!o.plot_path.empty()) {
        const auto kind = !o.plot_kind.empty() ? tvor::io::parse_plot_kind(o.plot_kind) : default_plot;
        if (!kind) throw UsageError("--plot-data needs --plot-kind for this command");
        const bool svg = o.plot_path.size() >= 4 && o.plot_path.ends_with(".svg");
        write_text(o.plot_path, tvor::io::emit_plot_data(report, *kind,
                                                         svg ? tvor::io::PlotFormat::svg : tvor::io::PlotFormat::csv));
    }
    write_text(o.out, cfg.output_format == tvor::io::OutputFormat::json ? tvor::io::dump(report)
                                                                          : render_csv(report, table_block));
}

// ---------------------------------------------------------------------------
// Shared loading
// ---------------------------------------------------------------------------

tvor::Dataset require_dataset(const std::string& path, const tvor::io::RunConfig& cfg, Json& report) {
    if (path.empty()) throw UsageError("--input is required");
    auto histograms = tvor::io::load_histograms(path);
    const auto read = histograms.size();
    tvor::Dataset ds(std::move(histograms), cfg.min_size_filter);
    report["dataset"] = Json{{"input", path},
                             {"histograms_read", read},
                             {"filtered_out", ds.filtered_out()},
                             {"histograms", ds.size()}};
    return ds;
}

tvor::RecordSet require_records(const std::string& path, const std::string& list, Json& report) {
    if (path.empty()) throw UsageError("--records is required");
    auto ingest = tvor::io::load_records(path);
    auto rs = ingest.records.filter_list(list);
    report["records"] = Json{{"input", path},
                             {"list_id", list},
                             {"records_read", ingest.records.size()},
                             {"records_selected", rs.size()},
                             {"without_birth_year", rs.missing_birth_years()}};
    return rs;
}

/// Birth years from --records, or expanded from one histogram of --input.
std::vector<int> require_years(const std::string& records, const std::string& input, const std::string& list,
                               Json& report) {
    if (!records.empty()) return require_records(records, list, report).birth_years();
    if (input.empty()) throw UsageError("one of --records or --input is required");
    const auto hs = tvor::io::load_histograms(input);
    for (const auto& h : hs) {
        if (list.empty() || h.label() == list) {
            report["histogram"] = Json{{"input", input}, {"label", h.label()}, {"N", h.total()}};
            return tvor::expand_to_years(h);
        }
    }
    throw UsageError("list '" + list + "' not found in '" + input + "'");
}

Json scores_block(std::span<const tvor::ScoreRecord> scores, std::size_t top) {
    const auto n = top == 0 ? scores.size() : std::min(top, scores.size());
    return tvor::io::to_json(scores.subspan(0, n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete total variation outlier ranking for histograms"};
    app.require_subcommand(1);
    CommonOptions o;

    std::string input, records, list, labels_arg, key, value, augment, export_path, kind = "planted";
    std::string convention = "both", scales = "1", sizes_arg = "100,1000,10000,100000,1000000";
    std::size_t top = 0, largest = 0, count = 0, bins = 50;
    bool debias = false, renormalize = false;
    std::optional<double> model_a, model_b;
    double alpha = 2.0, beta = 3.0, heaping = 0.3;
    Count size = 1000;

    std::map<std::string, std::function<void()>> handlers;
    const auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, o);
        return s;
    };

    // fit ---------------------------------------------------------------
    auto* fit = sub("fit", "Fit the expected-DTV model m = aN + b*sqrt(N)");
    fit->add_option("--input", input, "Histogram CSV (list_id,year,count)");
    handlers["fit"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("fit", cfg);
        const auto ds = require_dataset(input, cfg, report);
        report["model"] = tvor::io::to_json(tvor::fit_model(ds, cfg.fit_mode));
        emit(report, "model", cfg, o);
    };

    // score -------------------------------------------------------------
    auto* score = sub("score", "Score selected histograms against a fitted or given model");
    score->add_option("--input", input, "Histogram CSV");
    score->add_option("--labels", labels_arg, "Comma-separated labels to report (default: all)");
    score->add_option("--a", model_a, "Use this coefficient of N instead of fitting");
    score->add_option("--b", model_b, "Use this coefficient of sqrt(N) instead of fitting");
    handlers["score"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("score", cfg);
        const auto ds = require_dataset(input, cfg, report);
        if (model_a.has_value() != model_b.has_value()) throw UsageError("--a and --b must be given together");
        const auto model = model_a ? tvor::TvorModel{*model_a, *model_b, cfg.fit_mode, 0}
                                   : tvor::fit_model(ds, cfg.fit_mode);
        report["model"] = tvor::io::to_json(model);
        report["model"]["source"] = model_a ? "given" : "fitted";
        const auto ranked = tvor::rank(ds, model);
        Json out = Json::array();
        const auto wanted = split_list(labels_arg);
        for (const auto& l : wanted) {
            if (!ds.find(l)) throw UsageError("label '" + l + "' not in dataset");
        }
        for (const auto& s : ranked) {
            if (wanted.empty() || std::find(wanted.begin(), wanted.end(), s.label) != wanted.end()) {
                out.push_back(tvor::io::to_json(s));
            }
        }
        report["scores"] = out;
        emit(report, "scores", cfg, o, tvor::io::PlotKind::dtv_vs_n);
    };

    // rank --------------------------------------------------------------
    auto* rank = sub("rank", "Rank histograms by |d'|");
    rank->add_option("--input", input, "Histogram CSV");
    rank->add_option("--top", top, "Report only the first K ranks (0 = all)");
    rank->add_flag("--debias", debias, "Also apply the iterative additive debias");
    handlers["rank"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("rank", cfg);
        const auto ds = require_dataset(input, cfg, report);
        const auto r = tvor::run_tvor(ds, cfg.fit_mode);
        report["model"] = tvor::io::to_json(r.model);
        report["scores"] = scores_block(r.scores, top);
        if (debias) {
            const auto d = tvor::debias_iterative(r.scores, cfg.debias_max_iter, cfg.debias_tol);
            report["debias"] = tvor::io::to_json(d);
            report["debiased_scores"] = scores_block(d.adjusted_scores, top);
        }
        emit(report, "scores", cfg, o, tvor::io::PlotKind::dtv_vs_n);
    };

    // bias --------------------------------------------------------------
    auto* bias = sub("bias", "Correlation and regression of d' against histogram size");
    bias->add_option("--input", input, "Histogram CSV");
    bias->add_option("--convention", convention, "signed, absolute or both")
        ->check(CLI::IsMember({"signed", "absolute", "both"}));
    bias->add_option("--largest", largest, "Also fit |d'| against N over the K largest histograms");
    bias->add_flag("--renormalize", renormalize,
                   "Also report |d'| divided by its fitted line in N (demonstration only)");
    handlers["bias"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("bias", cfg);
        const auto ds = require_dataset(input, cfg, report);
        const auto r = tvor::run_tvor(ds, cfg.fit_mode);
        report["model"] = tvor::io::to_json(r.model);
        Json lines = Json::array();
        for (auto c : {tvor::ScoreConvention::signed_score, tvor::ScoreConvention::absolute_score}) {
            if (convention != "both" && convention != tvor::to_string(c)) continue;
            const auto b = tvor::bias_report(r.scores, c);
            lines.push_back(Json{{"convention", std::string(tvor::to_string(c))},
                                 {"correlation", number(b.correlation)},
                                 {"slope", number(b.line.slope)},
                                 {"intercept", number(b.line.intercept)},
                                 {"n", b.line.n}});
        }
        report["bias"] = lines;
        if (largest > 0) {
            report["largest_subset"] = tvor::io::to_json(tvor::largest_subset_slope(r.scores, largest));
            report["largest_subset"]["k"] = largest;
        }
        if (renormalize) {
            const auto line = tvor::bias_report(r.scores, tvor::ScoreConvention::absolute_score).line;
            const auto demo = tvor::renormalize_demo(r.scores, line);
            report["renormalization"] = Json{{"endorsed", tvor::RenormalizedScores::endorsed},
                                             {"note", "|d'| divided by slope*N + intercept; shown for comparison only"},
                                             {"line", tvor::io::to_json(line)},
                                             {"scores", scores_block(demo.scores, top)}};
        }
        emit(report, "bias", cfg, o, tvor::io::PlotKind::dtv_vs_n);
    };

    // sweep -------------------------------------------------------------
    auto* sweep = sub("sweep", "Rerun the ranking once per unique histogram size");
    sweep->add_option("--input", input, "Histogram CSV");
    handlers["sweep"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("sweep", cfg);
        const auto ds = require_dataset(input, cfg, report);
        const auto s = tvor::threshold_sweep(ds, cfg.fit_mode);
        const auto full_top = tvor::run_tvor(ds, cfg.fit_mode).top();
        std::size_t present = 0, skipped = 0;
        for (const auto& e : s.entries) {
            if (e.skipped()) ++skipped;
            if (e.threshold <= full_top.size) ++present;
        }
        report["summary"] = Json{{"thresholds", s.entries.size()},
                                 {"full_dataset_top_label", full_top.label},
                                 {"top_in", s.count_top(full_top.label)},
                                 {"present_in", present},
                                 {"skipped", skipped}};
        report["sweep"] = tvor::io::to_json(s);
        emit(report, "sweep", cfg, o, tvor::io::PlotKind::sweep);
    };

    // iqr ---------------------------------------------------------------
    auto* iqr = sub("iqr", "IQR outlier test on |d'| (optionally over the K largest histograms)");
    iqr->add_option("--input", input, "Histogram CSV");
    iqr->add_option("--largest", largest, "Run on the K largest histograms only (0 = all)");
    handlers["iqr"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("iqr", cfg);
        auto ds = require_dataset(input, cfg, report);
        if (largest > 0) {
            std::vector<tvor::Histogram> hs(ds.histograms().begin(), ds.histograms().end());
            if (largest > hs.size()) throw UsageError("--largest exceeds the number of histograms");
            std::stable_sort(hs.begin(), hs.end(), [](const auto& x, const auto& y) {
                return x.total() != y.total() ? x.total() > y.total() : x.label() < y.label();
            });
            hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(largest), hs.end());
            ds = tvor::Dataset(std::move(hs), cfg.min_size_filter);
            report["dataset"]["largest"] = largest;
        }
        const auto r = tvor::run_tvor(ds, cfg.fit_mode);
        std::vector<tvor::LabeledValue> values;
        for (const auto& s : r.scores) values.push_back({s.label, s.d_abs});
        const auto verdict = tvor::iqr_outliers(values, cfg.iqr_multiplier);
        report["model"] = tvor::io::to_json(r.model);
        report["iqr"] = tvor::io::to_json(verdict);
        Json rows = Json::array();
        for (const auto& s : r.scores) {
            rows.push_back(Json{{"rank", s.rank},
                                {"label", s.label},
                                {"N", s.size},
                                {"d_abs", number(s.d_abs)},
                                {"outlier", s.d_abs > verdict.upper_fence}});
        }
        report["values"] = rows;
        emit(report, "values", cfg, o);
    };

    // chisq -------------------------------------------------------------
    auto* chisq = sub("chisq", "Pearson chi-square against the uniform distribution at scaled sizes");
    chisq->add_option("--input", input, "Histogram CSV (default: built-in near-uniform fixture)");
    chisq->add_option("--label", list, "Histogram to test (default: the first)");
    chisq->add_option("--scale", scales, "Comma-separated integer scale factors");
    handlers["chisq"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("chisq", cfg);
        std::optional<tvor::Histogram> h;
        if (input.empty()) {
            h = tvor::near_uniform_fixture();
        } else {
            for (auto& x : tvor::io::load_histograms(input)) {
                if (list.empty() || x.label() == list) {
                    h = std::move(x);
                    break;
                }
            }
            if (!h) throw UsageError("histogram '" + list + "' not found");
        }
        report["histogram"] = tvor::io::to_json(*h);
        Json rows = Json::array();
        for (const auto& s : split_list(scales)) {
            const auto c = tvor::io::parse_integer<Count>(s);
            if (!c || *c == 0) throw UsageError("--scale entries must be positive integers");
            auto row = tvor::io::to_json(tvor::chi_square_uniform(h->scaled(*c)));
            row["scale"] = *c;
            rows.push_back(row);
        }
        report["results"] = rows;
        emit(report, "results", cfg, o);
    };

    // whipple -----------------------------------------------------------
    auto* whipple = sub("whipple", "Whipple's index of birth years");
    whipple->add_option("--records", records, "Records CSV (id,list_id,birth_year,alt_years,attr:*)");
    whipple->add_option("--input", input, "Histogram CSV, as an alternative to --records");
    whipple->add_option("--list", list, "Restrict to one list_id");
    handlers["whipple"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("whipple", cfg);
        const auto years = require_years(records, input, list, report);
        report["whipple"] =
            tvor::io::to_json(tvor::whipple_index_from_birth_years(years, cfg.reference_year, cfg.whipple_window));
        emit(report, "whipple", cfg, o);
    };

    // digits ------------------------------------------------------------
    auto* digits = sub("digits", "Last-digit profile of birth years");
    digits->add_option("--records", records, "Records CSV");
    digits->add_option("--input", input, "Histogram CSV, as an alternative to --records");
    digits->add_option("--list", list, "Restrict to one list_id");
    handlers["digits"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("digits", cfg);
        const auto years = require_years(records, input, list, report);
        const auto p = tvor::last_digit_profile(years);
        report["digit_profile"] = tvor::io::to_json(p);
        Json rows = Json::array();
        for (std::size_t d = 0; d < 10; ++d) rows.push_back(Json{{"digit", d}, {"count", p[d]}});
        report["table"] = rows;
        emit(report, "table", cfg, o, tvor::io::PlotKind::digit_profile);
    };

    // substitute --------------------------------------------------------
    auto* substitute = sub("substitute", "Replace stated birth years by their closest alternatives");
    substitute->add_option("--records", records, "Records CSV");
    substitute->add_option("--list", list, "Restrict to one list_id");
    substitute->add_option("--export", export_path, "Write the substituted records CSV here");
    handlers["substitute"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("substitute", cfg);
        const auto rs = require_records(records, list, report);
        const auto res = tvor::substitute_closest(rs);
        report["substitution"] = tvor::io::to_json(res.report);
        Json rows = Json::array();
        for (std::size_t d = 0; d < 10; ++d) {
            const auto before = res.report.digit_profile_before[d], after = res.report.digit_profile_after[d];
            rows.push_back(Json{{"digit", d},
                                {"before", before},
                                {"after", after},
                                {"change", static_cast<std::int64_t>(after) - static_cast<std::int64_t>(before)}});
        }
        report["table"] = rows;
        if (!export_path.empty()) {
            std::ostringstream csv;
            tvor::io::write_records(csv, res.records);
            write_text(export_path, csv.str());
        }
        emit(report, "table", cfg, o, tvor::io::PlotKind::digit_profile);
    };

    // split -------------------------------------------------------------
    auto* split = sub("split", "Split records on an attribute value and compare both histograms");
    split->add_option("--records", records, "Records CSV");
    split->add_option("--list", list, "Restrict to one list_id");
    split->add_option("--key", key, "Attribute key (attr:KEY column)")->required();
    split->add_option("--value", value, "Attribute value for the matching side")->required();
    split->add_option("--augment", augment, "Histogram CSV to add both sides to before ranking");
    split->add_option("--top", top, "Report only the first K ranks (0 = all)");
    handlers["split"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("split", cfg);
        const auto rs = require_records(records, list, report);
        const auto res = tvor::split_by_attribute(rs, key, value, list.empty() ? "" : list + ":");
        std::vector<tvor::Histogram> sides;
        if (res.match_histogram) sides.push_back(*res.match_histogram);
        if (res.rest_histogram) sides.push_back(*res.rest_histogram);
        report["split"] = Json{{"key", key},
                               {"value", value},
                               {"match_records", res.match_records},
                               {"rest_records", res.rest_records},
                               {"missing_attribute", res.missing_attribute},
                               {"without_birth_year", res.without_birth_year}};
        std::optional<tvor::Ranking> ranking;
        if (!augment.empty()) {
            const auto ds = require_dataset(augment, cfg, report);
            ranking = tvor::augment_and_rank(ds, sides, cfg.fit_mode);
            report["model"] = tvor::io::to_json(ranking->model);
            report["scores"] = scores_block(ranking->scores, top);
        }
        Json rows = Json::array();
        for (const auto& h : sides) {
            Json row{{"label", h.label()}, {"N", h.total()}, {"dtv", tvor::dtv(h)}};
            if (ranking) {
                const auto* s = ranking->find(h.label());
                row["rank"] = s->rank;
                row["d_abs"] = number(s->d_abs);
            }
            rows.push_back(row);
        }
        report["sides"] = rows;
        emit(report, "sides", cfg, o);
    };

    // simulate ----------------------------------------------------------
    auto* simulate = sub("simulate", "Synthetic datasets and Monte Carlo experiments");
    simulate->add_option("--kind", kind, "planted, same-smoothness, near-uniform, gc, expected-dtv")
        ->check(CLI::IsMember({"planted", "same-smoothness", "near-uniform", "gc", "expected-dtv"}));
    simulate->add_option("--export", export_path, "Write generated histograms as CSV (list_id,year,count)");
    simulate->add_option("--count", count, "Number of smooth histograms (0 = kind default)");
    simulate->add_option("--heaping", heaping, "Heaping fraction of the planted histogram");
    simulate->add_option("--alpha", alpha, "Beta shape alpha (gc, expected-dtv)");
    simulate->add_option("--beta", beta, "Beta shape beta (gc, expected-dtv)");
    simulate->add_option("--bins", bins, "Number of bins (gc, expected-dtv)");
    simulate->add_option("--sizes", sizes_arg, "Comma-separated sample sizes (gc)");
    simulate->add_option("--size", size, "Sample size (expected-dtv)");
    handlers["simulate"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("simulate", cfg);
        report["kind"] = kind;
        std::string table = "histograms";
        std::optional<tvor::io::PlotKind> plot;
        const auto dataset_block = [&](const tvor::Dataset& ds) {
            Json rows = Json::array();
            for (const auto& h : ds.histograms()) {
                rows.push_back(Json{{"label", h.label()}, {"N", h.total()}, {"dtv", tvor::dtv(h)}});
            }
            report["histograms"] = rows;
            if (!export_path.empty()) {
                std::ostringstream csv;
                tvor::io::write_histograms(csv, ds.histograms());
                write_text(export_path, csv.str());
            }
        };
        if (kind == "planted") {
            tvor::PlantedOutlierConfig pc;
            if (count) pc.smooth.count = count;
            pc.heaping_fraction = heaping;
            dataset_block(tvor::make_synthetic_dataset(tvor::planted_outlier_spec(pc, cfg.rng_seed), cfg.rng_seed));
            report["planted_label"] = pc.planted_label;
        } else if (kind == "same-smoothness") {
            tvor::SameSmoothnessConfig sc;
            if (count) sc.count = count;
            dataset_block(tvor::make_synthetic_dataset(tvor::same_smoothness_spec(sc, cfg.rng_seed), cfg.rng_seed));
        } else if (kind == "near-uniform") {
            const auto h = tvor::near_uniform_fixture();
            dataset_block(tvor::Dataset({h}, 1));
            report["fixture"] = tvor::io::to_json(h);
        } else if (kind == "gc") {
            const auto d = tvor::discretize_beta(alpha, beta, bins);
            std::vector<Count> sizes;
            for (const auto& s : split_list(sizes_arg)) {
                const auto v = tvor::io::parse_integer<Count>(s);
                if (!v || *v == 0) throw UsageError("--sizes entries must be positive integers");
                sizes.push_back(*v);
            }
            report["distribution"] = Json{{"family", "beta"},
                                          {"alpha", number(alpha)},
                                          {"beta", number(beta)},
                                          {"bins", bins},
                                          {"theoretical_dtv", number(tvor::theoretical_dtv(d))}};
            report["convergence"] =
                tvor::io::to_json(tvor::glivenko_cantelli_curve(d, sizes, cfg.trials, cfg.rng_seed));
            table = "convergence";
            plot = tvor::io::PlotKind::gc_curve;
        } else {
            const auto d = tvor::discretize_beta(alpha, beta, bins);
            const auto est = tvor::estimate_expected_dtv(d, size, cfg.trials, cfg.rng_seed);
            report["estimate"] = Json{{"N", est.size},
                                      {"trials", est.trials},
                                      {"mean", number(est.mean)},
                                      {"std_error", number(est.std_error)},
                                      {"theoretical_dtv_times_N",
                                       number(tvor::theoretical_dtv(d) * static_cast<double>(est.size))}};
            table = "estimate";
        }
        emit(report, table, cfg, o, plot);
    };

    // exclude -----------------------------------------------------------
    auto* exclude = sub("exclude", "Drop named lists, then refit and rank");
    exclude->add_option("--input", input, "Histogram CSV");
    exclude->add_option("--labels", labels_arg, "Comma-separated labels to drop")->required();
    exclude->add_option("--export", export_path, "Write the remaining histograms as CSV");
    exclude->add_option("--top", top, "Report only the first K ranks (0 = all)");
    handlers["exclude"] = [&] {
        const auto cfg = effective_config(o);
        auto report = tvor::io::make_report("exclude", cfg);
        const auto ds = require_dataset(input, cfg, report);
        const auto wanted = split_list(labels_arg);
        const auto ex = tvor::exclude_lists(ds, std::set<std::string>(wanted.begin(), wanted.end()));
        report["excluded"] = Json{{"labels", wanted}, {"removed_count", ex.removed_count},
                                  {"remaining", ex.dataset.size()}};
        const auto r = tvor::run_tvor(ex.dataset, cfg.fit_mode);
        report["model"] = tvor::io::to_json(r.model);
        report["scores"] = scores_block(r.scores, top);
        if (!export_path.empty()) {
            std::ostringstream csv;
            tvor::io::write_histograms(csv, ex.dataset.histograms());
            write_text(export_path, csv.str());
        }
        emit(report, "scores", cfg, o, tvor::io::PlotKind::dtv_vs_n);
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        for (auto* s : app.get_subcommands()) handlers.at(s->get_name())();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
