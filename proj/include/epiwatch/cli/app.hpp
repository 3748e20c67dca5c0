#pragma once

#include "epiwatch/epiwatch.hpp"
#include "epiwatch/service/api.hpp"
#include "epiwatch/service/config.hpp"
#include "epiwatch/service/payloads.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

// Operator command line. run() is the whole program minus process setup so
// tests can drive it in-process.
namespace epiwatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

struct Options {
    std::string data_dir = "data/sample";
    std::string region;
    std::string from;
    std::string to;
    std::size_t horizon = projector::kDefaultHorizon;
    std::size_t sims = projector::kDefaultSims;
    std::uint64_t seed = projector::kDefaultSeed;
    double si_shape = projector::kDefaultSiShape;
    double si_scale = projector::kDefaultSiScale;
    std::size_t smooth = 14;
    std::size_t synth_smooth = 0;
    std::string split;
    std::string format = "json";
    std::string output;
    std::string config;
    std::string scenario;
    std::string bind;
    std::string correction = "none";
    std::optional<double> rt_override;
    std::size_t replicates = estimators::WaveOptions{}.bootstrap_replicates;
    std::uint64_t wave_seed = estimators::WaveOptions{}.seed;
};

/// Blocking `serve` implementation, injected by the executable so the
/// library carries no process-level signal handling.
using ServeFn = std::function<int(const service::ApiConfig&, std::ostream& out, std::ostream& err)>;

namespace detail {

using nlohmann::json;

inline std::string csv_real(double x) { return format_real(round6(x)); }

inline std::string csv_real(const std::optional<double>& x) { return x ? csv_real(*x) : std::string(); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Registry code as given, otherwise a display name or alias resolved by
/// the matcher.
inline std::string resolve_region(const ingest::Snapshot& snap, const std::string& raw) {
    if (raw.empty()) throw Error(Errc::InvalidParameter, "--region is required");
    if (snap.regions.contains(raw)) return raw;
    return snap.matcher().match(raw);
}

inline const IncidenceSeries& series_of(const ingest::Snapshot& snap, const std::string& code) {
    const auto* s = snap.find_series(code);
    if (s == nullptr) throw Error(Errc::InsufficientData, "region '" + code + "' has no case series");
    return *s;
}

inline DateRange window_of(const Options& o, const IncidenceSeries& s) {
    DateRange w{s.start, s.end()};
    if (!o.from.empty()) w.from = Date::parse(o.from);
    if (!o.to.empty()) w.to = Date::parse(o.to);
    return w;
}

inline projector::ProjectionParams projection_params(const Options& o) {
    projector::ProjectionParams p;
    p.horizon = o.horizon;
    p.n_sims = o.sims;
    p.seed = o.seed;
    return p;
}

inline std::string rt_csv(const estimators::RtSeries& rt) {
    std::ostringstream out;
    out << "date,cases,rt,reliable\n";
    for (std::size_t i = 0; i < rt.size(); ++i) {
        out << (rt.start + static_cast<std::int64_t>(i)).iso() << ',' << rt.cases[i] << ',' << csv_real(rt.rt[i])
            << ',' << (rt.reliable[i] ? "true" : "false") << '\n';
    }
    return out.str();
}

inline std::string waves_csv(const RegionKey& region, const estimators::WaveMarkers& m) {
    std::ostringstream out;
    out << "region,first_peak,first_peak_ci_low,first_peak_ci_high,valley,bootstrap_replicates\n";
    out << region.code << ',' << m.first_peak.iso() << ',' << m.first_peak_ci.first.iso() << ','
        << m.first_peak_ci.second.iso() << ',' << m.valley.iso() << ',' << m.bootstrap_replicates << '\n';
    return out.str();
}

inline std::string backtest_csv(const projector::BacktestReport& r) {
    std::ostringstream out;
    out << "day,observed_ma,projected_median,q5,q95\n";
    for (std::size_t h = 0; h < r.horizon; ++h) {
        out << (r.split_date + static_cast<std::int64_t>(h + 1)).iso() << ',' << csv_real(r.observed_ma[h]) << ','
            << csv_real(r.projected_median[h]) << ',' << r.band_low[h] << ',' << r.band_high[h] << '\n';
    }
    return out.str();
}

}  // namespace detail

/// One row of the per-region wave summary.
struct ReportRow {
    RegionKey region;
    std::optional<Date> first_peak;
    std::optional<Date> second_wave_start;
    std::optional<double> r_first;
    std::optional<double> r_second;
    std::optional<double> d_first;
    std::optional<double> d_second;
    std::string status = "ok";
};

inline std::optional<double> doubling_or_null(const std::optional<estimators::GrowthFit>& fit) {
    if (!fit) return std::nullopt;
    return fit->doubling_time;
}

inline ReportRow report_row(const IncidenceSeries& series, std::size_t smooth) {
    ReportRow row;
    row.region = series.region;
    try {
        estimators::WaveOptions opts;
        opts.smooth_window = smooth;
        opts.bootstrap_replicates = 0;
        const auto markers = estimators::detect_waves(series, opts);
        row.first_peak = markers.first_peak;
        row.second_wave_start = markers.valley;
        const auto growth = estimators::wave_growth(series, markers, smooth);
        if (growth.first_wave) row.r_first = growth.first_wave->r;
        if (growth.second_wave) row.r_second = growth.second_wave->r;
        row.d_first = doubling_or_null(growth.first_wave);
        row.d_second = doubling_or_null(growth.second_wave);
    } catch (const Error& e) {
        row.status = std::string(to_string(e.code()));
    }
    return row;
}

inline std::vector<ReportRow> wave_report(const ingest::Snapshot& snap, std::size_t smooth) {
    std::vector<ReportRow> rows;
    for (const auto& region : snap.regions.sorted()) {
        if (const auto* s = snap.find_series(region.code)) rows.push_back(report_row(*s, smooth));
    }
    return rows;
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "region_code,region_name,first_wave_peak,second_wave_start,r_first_wave,r_second_wave,"
           "doubling_time_first_wave,doubling_time_second_wave,status\n";
    for (const auto& r : rows) {
        out << r.region.code << ',' << ingest::detail::quote_if_needed(r.region.name) << ','
            << (r.first_peak ? r.first_peak->iso() : "") << ','
            << (r.second_wave_start ? r.second_wave_start->iso() : "") << ',' << detail::csv_real(r.r_first) << ','
            << detail::csv_real(r.r_second) << ',' << detail::csv_real(r.d_first) << ','
            << detail::csv_real(r.d_second) << ',' << r.status << '\n';
    }
    return out.str();
}

inline nlohmann::json report_json(const std::vector<ReportRow>& rows) {
    using service::real;
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"region_code", r.region.code},
                       {"region_name", r.region.name},
                       {"first_wave_peak", r.first_peak ? nlohmann::json(r.first_peak->iso()) : nlohmann::json(nullptr)},
                       {"second_wave_start", r.second_wave_start ? nlohmann::json(r.second_wave_start->iso()) : nlohmann::json(nullptr)},
                       {"r_first_wave", real(r.r_first)},
                       {"r_second_wave", real(r.r_second)},
                       {"doubling_time_first_wave", real(r.d_first)},
                       {"doubling_time_second_wave", real(r.d_second)},
                       {"status", r.status}});
    }
    return out;
}

namespace detail {

inline std::string validate_output(const ingest::Snapshot& snap, const Options& o) {
    if (o.format == "csv") {
        std::ostringstream out;
        out << "line,message\n";
        for (const auto& w : snap.warnings) out << w.line << ',' << ingest::detail::quote_if_needed(w.message) << '\n';
        return out.str();
    }
    json warnings = json::array();
    for (const auto& w : snap.warnings) warnings.push_back({{"line", w.line}, {"message", w.message}});
    json aggregated = json::array();
    for (const auto& code : snap.aggregated) aggregated.push_back(code);
    std::optional<Date> lo, hi;
    for (const auto& [code, s] : snap.series) {
        lo = lo ? std::min(*lo, s.start) : s.start;
        hi = hi ? std::max(*hi, s.end()) : s.end();
    }
    return dump({{"regions", snap.regions.size()},
                 {"series", snap.series.size()},
                 {"populations", snap.populations.size()},
                 {"aliases", snap.aliases.size()},
                 {"aggregated", std::move(aggregated)},
                 {"from", lo ? json(lo->iso()) : json(nullptr)},
                 {"to", hi ? json(hi->iso()) : json(nullptr)},
                 {"warnings", std::move(warnings)}});
}

inline std::string estimate_output(const ingest::Snapshot& snap, const Options& o,
                                   const projector::SerialInterval& si) {
    const auto code = resolve_region(snap, o.region);
    const auto& s = series_of(snap, code);
    const auto rt = o.correction == "none" ? estimators::estimate_rt_wt(s, si) : estimators::estimate_rt_corrected(s, si);
    if (o.format == "csv") return rt_csv(rt);
    const auto fit = estimators::fit_growth(s, window_of(o, s));
    return dump({{"region", code}, {"growth", service::growth_payload(fit)}, {"rt", service::rt_payload(rt)}});
}

inline std::string project_output(const ingest::Snapshot& snap, const Options& o,
                                  const projector::SerialInterval& si) {
    const auto code = resolve_region(snap, o.region);
    const auto result = projector::project_region(snap, code, si, projection_params(o), o.rt_override);
    if (o.format == "csv") return projector::projection_csv(result);
    return dump(service::projection_payload(result));
}

inline std::string waves_output(const ingest::Snapshot& snap, const Options& o) {
    const auto code = resolve_region(snap, o.region);
    const auto& s = series_of(snap, code);
    estimators::WaveOptions opts;
    opts.smooth_window = o.smooth;
    opts.bootstrap_replicates = o.replicates;
    opts.seed = o.wave_seed;
    const auto markers = estimators::detect_waves(s, opts);
    if (o.format == "csv") return waves_csv(s.region, markers);
    return dump(service::waves_payload(s.region, markers));
}

inline std::string backtest_output(const ingest::Snapshot& snap, const Options& o,
                                   const projector::SerialInterval& si) {
    const auto code = resolve_region(snap, o.region);
    const auto& s = series_of(snap, code);
    const auto report = projector::backtest(s.confirmed, s.start, si, Date::parse(o.split), projection_params(o));
    if (o.format == "csv") return backtest_csv(report);
    return dump(service::backtest_payload(s.region, report));
}

inline std::string synth_output(const Options& o) {
    const auto scenario = synthgen::parse_scenario(ingest::read_file(o.scenario));
    const auto series = synthgen::generate(scenario);
    if (o.format == "csv") {
        std::vector<ingest::CaseRecord> records;
        for (std::size_t i = 0; i < series.size(); ++i) {
            ingest::CaseRecord rec;
            rec.date = series.date_at(i);
            rec.region_code = series.region.code;
            rec.confirmed = series.confirmed[i];
            records.push_back(std::move(rec));
        }
        return ingest::write_daily_csv(records);
    }
    return dump(service::series_payload(series, o.synth_smooth));
}

inline CLI::Validator iso_date() {
    return CLI::Validator(
        [](std::string& value) -> std::string {
            try {
                Date::parse(value);
                return {};
            } catch (const Error& e) {
                return e.detail();
            }
        },
        "YYYY-MM-DD", "ISO date");
}

inline void write_output(const std::string& text, const Options& o, std::ostream& out) {
    if (o.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.output, std::ios::binary);
    file << text;
    if (!file) throw Error(Errc::IoError, "cannot write " + o.output);
}

inline service::ApiConfig serve_config(const Options& o, const CLI::App& sub) {
    service::ApiConfig config;
    if (!o.config.empty()) config = service::parse_config(ingest::read_file(o.config));
    service::apply_env_overrides(config);
    if (sub.count("--data-dir") > 0) config.data_dir = o.data_dir;
    if (sub.count("--bind") > 0) config.bind_address = o.bind;
    if (sub.count("--si-shape") > 0) config.si_shape = o.si_shape;
    if (sub.count("--si-scale") > 0) config.si_scale = o.si_scale;
    return config;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const ServeFn& serve = {}) {
    Options o;
    if (const char* dir = std::getenv("EPIWATCH_DATA_DIR"); dir && *dir) o.data_dir = dir;

    CLI::App app{"Epidemic surveillance analytics", "epiwatch"};
    app.require_subcommand(1);

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--data-dir", o.data_dir, "Directory with the four input CSVs");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output,-o", o.output, "Write to a file instead of stdout");
        sub->add_option("--si-shape", o.si_shape, "Serial-interval gamma shape")->check(CLI::PositiveNumber);
        sub->add_option("--si-scale", o.si_scale, "Serial-interval gamma scale")->check(CLI::PositiveNumber);
    };
    const auto region = [&](CLI::App* sub) {
        sub->add_option("--region,-r", o.region, "Region code, name or alias")->required();
    };
    const auto projection = [&](CLI::App* sub) {
        sub->add_option("--horizon", o.horizon, "Days to project")->check(CLI::Range(std::size_t{1}, service::kMaxHorizon));
        sub->add_option("--sims", o.sims, "Monte-Carlo trajectories")->check(CLI::Range(std::size_t{1}, service::kMaxSims));
        sub->add_option("--seed", o.seed, "Random seed");
    };

    auto* validate = app.add_subcommand("validate", "Load and check a data directory");
    common(validate);

    auto* estimate = app.add_subcommand("estimate", "Growth fit and reproduction-number series");
    common(estimate);
    region(estimate);
    estimate->add_option("--from", o.from, "Growth window start")->check(detail::iso_date());
    estimate->add_option("--to", o.to, "Growth window end")->check(detail::iso_date());
    estimate->add_option("--correction", o.correction)->check(CLI::IsMember({"none", "truncation"}));

    auto* project = app.add_subcommand("project", "Renewal-process projection");
    common(project);
    region(project);
    projection(project);
    project->add_option("--rt-override", o.rt_override, "Growth driver instead of the latest estimate")
        ->check(CLI::NonNegativeNumber);

    auto* waves = app.add_subcommand("waves", "First-wave peak and second-wave start");
    common(waves);
    region(waves);
    waves->add_option("--smooth", o.smooth, "Moving-average window")->check(CLI::Range(1, 365));
    waves->add_option("--replicates", o.replicates, "Bootstrap replicates for the peak interval");
    waves->add_option("--seed", o.wave_seed, "Bootstrap seed");

    auto* bt = app.add_subcommand("backtest", "Project from a split date and score against held-out days");
    common(bt);
    region(bt);
    projection(bt);
    bt->add_option("--split", o.split, "Last day of history")->required()->check(detail::iso_date());

    auto* synth = app.add_subcommand("synth", "Generate a synthetic series from a scenario file");
    synth->add_option("--scenario", o.scenario, "Scenario JSON")->required();
    synth->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
    synth->add_option("--output,-o", o.output);
    synth->add_option("--smooth", o.synth_smooth, "Include a moving average in JSON output (0 omits it)");

    auto* report = app.add_subcommand("report", "Per-region wave and growth summary");
    common(report);
    report->add_option("--smooth", o.smooth, "Moving-average window")->check(CLI::Range(1, 365));

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--config", o.config, "TOML config file");
    serve_cmd->add_option("--data-dir", o.data_dir);
    serve_cmd->add_option("--bind", o.bind, "host:port");
    serve_cmd->add_option("--si-shape", o.si_shape)->check(CLI::PositiveNumber);
    serve_cmd->add_option("--si-scale", o.si_scale)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }
    if (report->parsed() && report->count("--format") == 0) o.format = "csv";

    try {
        if (serve_cmd->parsed()) {
            const auto config = detail::serve_config(o, *serve_cmd);
            if (!serve) {
                err << "serve is not available in this build\n";
                return kExitUsage;
            }
            return serve(config, out, err);
        }
        if (synth->parsed()) {
            detail::write_output(detail::synth_output(o), o, out);
            return kExitOk;
        }
        const auto si = projector::discretize_serial_interval(o.si_shape, o.si_scale);
        const auto snap = ingest::load_snapshot(o.data_dir);
        std::string text;
        if (validate->parsed()) text = detail::validate_output(snap, o);
        else if (estimate->parsed()) text = detail::estimate_output(snap, o, si);
        else if (project->parsed()) text = detail::project_output(snap, o, si);
        else if (waves->parsed()) text = detail::waves_output(snap, o);
        else if (bt->parsed()) text = detail::backtest_output(snap, o, si);
        else if (report->parsed()) {
            const auto rows = wave_report(snap, o.smooth);
            text = o.format == "csv" ? report_csv(rows) : detail::dump(report_json(rows));
        }
        detail::write_output(text, o, out);
        return kExitOk;
    } catch (const Error& e) {
        err << e.what();
        if (!e.candidates().empty()) {
            err << " (";
            for (std::size_t i = 0; i < e.candidates().size(); ++i) err << (i ? ", " : "") << e.candidates()[i];
            err << ")";
        }
        err << '\n';
        return kExitDataError;
    }
}

}  // namespace epiwatch::cli
