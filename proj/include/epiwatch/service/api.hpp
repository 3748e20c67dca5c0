#pragma once

#include "epiwatch/core/error.hpp"
#include "epiwatch/estimators/growth.hpp"
#include "epiwatch/estimators/indicators.hpp"
#include "epiwatch/estimators/rt.hpp"
#include "epiwatch/estimators/waves.hpp"
#include "epiwatch/ingest/snapshot.hpp"
#include "epiwatch/projector/backtest.hpp"
#include "epiwatch/projector/projection.hpp"
#include "epiwatch/projector/serial_interval.hpp"
#include "epiwatch/service/config.hpp"
#include "epiwatch/service/payloads.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace epiwatch::service {

using Query = std::map<std::string, std::string, std::less<>>;
using Logger = std::function<void(std::string_view)>;

inline void stderr_logger(std::string_view message) {
    std::clog << ingest::format_timestamp(ingest::now_timestamp()) << " epiwatch: " << message << '\n';
}

struct ApiResponse {
    ApiResponse() = default;
    ApiResponse(int status_code, std::string payload) : status(status_code), body(std::move(payload)) {}

    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;
};

/// Holds the live snapshot. Readers take a shared_ptr copy and keep using it
/// for the whole request, so a concurrent publish never mixes two snapshots.
class SnapshotStore {
public:
    std::shared_ptr<const ingest::Snapshot> get() const {
        std::lock_guard lock(mutex_);
        return current_;
    }

    void publish(std::shared_ptr<const ingest::Snapshot> next) {
        std::lock_guard lock(mutex_);
        current_ = std::move(next);
    }

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const ingest::Snapshot> current_;
};

/// Bounded least-recently-used map from request key to response body.
class ResponseCache {
public:
    explicit ResponseCache(std::size_t capacity) : capacity_(capacity) {}

    std::optional<std::string> get(const std::string& key) {
        std::lock_guard lock(mutex_);
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        entries_.splice(entries_.begin(), entries_, it->second);
        return it->second->second;
    }

    void put(const std::string& key, std::string value) {
        if (capacity_ == 0) return;
        std::lock_guard lock(mutex_);
        if (auto it = index_.find(key); it != index_.end()) {
            it->second->second = std::move(value);
            entries_.splice(entries_.begin(), entries_, it->second);
            return;
        }
        entries_.emplace_front(key, std::move(value));
        index_.emplace(key, entries_.begin());
        while (entries_.size() > capacity_) {
            index_.erase(entries_.back().first);
            entries_.pop_back();
        }
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::pair<std::string, std::string>> entries_;
    std::unordered_map<std::string, std::list<std::pair<std::string, std::string>>::iterator> index_;
};

/// Error taxonomy: 404 unknown region, 400 malformed parameter, 422 valid
/// request the data cannot answer, 503 no snapshot yet.
inline int status_for(Errc code) {
    switch (code) {
    case Errc::UnknownRegion: return 404;
    case Errc::InvalidParameter: return 400;
    case Errc::InsufficientData:
    case Errc::NoWaveStructure:
    case Errc::UndefinedDoubling:
    case Errc::InvalidSerialInterval:
    case Errc::EmptyInput:
    case Errc::OutOfRange: return 422;
    default: return 500;
    }
}

inline constexpr std::size_t kMaxHorizon = 60;
inline constexpr std::size_t kMaxSims = 100000;

/// Request dispatch over the live snapshot. Every response is a pure
/// function of (snapshot, path, query).
class Api {
public:
    explicit Api(ApiConfig config, Logger log = stderr_logger)
        : config_(std::move(config)),
          log_(std::move(log)),
          si_(projector::discretize_serial_interval(config_.si_shape, config_.si_scale)),
          cache_(config_.projection_cache_size) {}

    const ApiConfig& config() const noexcept { return config_; }
    const projector::SerialInterval& serial_interval() const noexcept { return si_; }
    std::shared_ptr<const ingest::Snapshot> snapshot() const { return store_.get(); }
    const ResponseCache& cache() const noexcept { return cache_; }

    /// Rebuilds the snapshot from data_dir and swaps it in. On failure the
    /// previous snapshot stays live and the error is logged.
    bool refresh() {
        std::lock_guard lock(refresh_mutex_);
        try {
            auto as_of = ingest::now_timestamp();
            if (const auto prev = store_.get(); prev && as_of <= prev->as_of) {
                as_of = prev->as_of + std::chrono::milliseconds(1);
            }
            auto next = std::make_shared<const ingest::Snapshot>(ingest::load_snapshot(config_.data_dir, as_of));
            for (const auto& w : next->warnings) {
                log_(std::string(ingest::kDailyCasesFile) + ": line " + std::to_string(w.line) + ": " + w.message);
            }
            store_.publish(std::move(next));
            return true;
        } catch (const Error& e) {
            log_(std::string("refresh failed, keeping previous snapshot: ") + e.what());
            return false;
        }
    }

    void publish(ingest::Snapshot snapshot) {
        store_.publish(std::make_shared<const ingest::Snapshot>(std::move(snapshot)));
    }

    ApiResponse handle(std::string_view method, std::string_view path, const Query& query = {},
                       std::string_view origin = {}) const {
        ApiResponse response;
        if (method == "OPTIONS") {
            response.status = 204;
        } else if (method != "GET" && method != "HEAD") {
            response = error(405, "MethodNotAllowed", "read-only API");
        } else {
            response = route(path, query);
        }
        add_cors(response, origin);
        return response;
    }

private:
    ApiResponse route(std::string_view path, const Query& query) const {
        const auto snap = store_.get();
        if (path == "/healthz") {
            if (!snap) {
                return {503, json{{"status", "loading"}, {"snapshot_as_of", nullptr}}.dump()};
            }
            return {200, json{{"status", "ok"}, {"snapshot_as_of", ingest::format_timestamp(snap->as_of)}}.dump()};
        }
        constexpr std::string_view prefix = "/api/v1/regions";
        if (path.substr(0, prefix.size()) != prefix) {
            return error(404, "NotFound", "no route for " + std::string(path));
        }
        if (!snap) {
            return error(503, "NotLoaded", "no snapshot loaded yet");
        }
        auto rest = path.substr(prefix.size());
        if (rest.empty() || rest == "/") {
            return {200, regions_payload(snap->regions).dump()};
        }
        if (rest.front() != '/') {
            return error(404, "NotFound", "no route for " + std::string(path));
        }
        rest.remove_prefix(1);
        const auto slash = rest.find('/');
        const auto code = std::string(rest.substr(0, slash));
        const auto resource = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);

        try {
            const auto& region = snap->regions.at(code);
            if (resource == "series") return series(*snap, region, query);
            if (resource == "rt") return rt(*snap, region, query);
            if (resource == "projection") return projection(*snap, region, query);
            if (resource == "waves") return waves(*snap, region, query);
            if (resource == "growth") return growth(*snap, region, query);
            if (resource == "indicators") return indicators(*snap, region);
            return error(404, "NotFound", "no resource '" + std::string(resource) + "'");
        } catch (const Error& e) {
            return error(status_for(e.code()), std::string(to_string(e.code())), e.detail());
        }
    }

    static ApiResponse error(int status, std::string_view code, std::string_view message) {
        return {status, error_payload(code, message).dump()};
    }

    void add_cors(ApiResponse& response, std::string_view origin) const {
        if (origin.empty()) return;
        for (const auto& allowed : config_.cors_allowed_origins) {
            if (allowed == "*" || allowed == origin) {
                response.headers.emplace_back("Access-Control-Allow-Origin", allowed == "*" ? "*" : std::string(origin));
                response.headers.emplace_back("Access-Control-Allow-Methods", "GET, OPTIONS");
                response.headers.emplace_back("Vary", "Origin");
                return;
            }
        }
    }

    /// Empty values count as absent.
    static std::optional<std::string_view> param(const Query& q, std::string_view key) {
        auto it = q.find(key);
        if (it == q.end() || it->second.empty()) return std::nullopt;
        return std::string_view(it->second);
    }

    template <class T>
    static T integer_param(const Query& q, std::string_view key, T fallback, T lo, T hi) {
        const auto v = param(q, key);
        if (!v) return fallback;
        T out{};
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || ptr != v->data() + v->size() || out < lo || out > hi) {
            throw Error(Errc::InvalidParameter, std::string(key) + " must be an integer in [" + std::to_string(lo) +
                                                    ", " + std::to_string(hi) + "], got '" + std::string(*v) + "'");
        }
        return out;
    }

    static std::optional<Date> date_param(const Query& q, std::string_view key) {
        const auto v = param(q, key);
        if (!v) return std::nullopt;
        try {
            return Date::parse(*v);
        } catch (const Error&) {
            throw Error(Errc::InvalidParameter, std::string(key) + " must be YYYY-MM-DD, got '" + std::string(*v) + "'");
        }
    }

    static const IncidenceSeries& series_of(const ingest::Snapshot& snap, const RegionKey& region) {
        const auto* s = snap.find_series(region.code);
        if (!s) throw Error(Errc::InsufficientData, "region '" + region.code + "' has no case series");
        return *s;
    }

    ApiResponse series(const ingest::Snapshot& snap, const RegionKey& region, const Query& q) const {
        const auto smooth = integer_param<std::size_t>(q, "smooth", 0, 0, 3650);
        return {200, series_payload(series_of(snap, region), smooth).dump()};
    }

    ApiResponse rt(const ingest::Snapshot& snap, const RegionKey& region, const Query& q) const {
        const auto correction = param(q, "correction").value_or("none");
        if (correction != "none" && correction != "truncation") {
            throw Error(Errc::InvalidParameter, "correction must be 'none' or 'truncation'");
        }
        const auto& s = series_of(snap, region);
        auto out = estimators::estimate_rt_wt(s, si_);
        if (correction == "truncation") out = estimators::right_truncation_correction(out, si_, s.end());
        return {200, rt_payload(out).dump()};
    }

    ApiResponse projection(const ingest::Snapshot& snap, const RegionKey& region, const Query& q) const {
        projector::ProjectionParams params;
        params.horizon = integer_param<std::size_t>(q, "horizon", projector::kDefaultHorizon, 1, kMaxHorizon);
        params.n_sims = integer_param<std::size_t>(q, "sims", projector::kDefaultSims, 1, kMaxSims);
        params.seed = integer_param<std::uint64_t>(q, "seed", projector::kDefaultSeed, 0,
                                                   std::numeric_limits<std::uint64_t>::max());
        std::optional<double> rt_override;
        if (const auto v = param(q, "rt_override")) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
            if (ec != std::errc{} || ptr != v->data() + v->size() || !std::isfinite(x) || x < 0.0) {
                throw Error(Errc::InvalidParameter, "rt_override must be a non-negative number");
            }
            rt_override = x;
        }
        const auto key = region.code + '|' + std::to_string(params.horizon) + '|' + std::to_string(params.n_sims) +
                         '|' + std::to_string(params.seed) + '|' + (rt_override ? format_real(*rt_override) : "-") +
                         '|' + ingest::format_timestamp(snap.as_of);
        if (auto hit = cache_.get(key)) return {200, std::move(*hit)};
        auto body = projection_payload(projector::project_region(snap, region.code, si_, params, rt_override)).dump();
        cache_.put(key, body);
        return {200, std::move(body)};
    }

    ApiResponse waves(const ingest::Snapshot& snap, const RegionKey& region, const Query& q) const {
        estimators::WaveOptions options;
        options.smooth_window = integer_param<std::size_t>(q, "smooth", 14, 1, 365);
        const auto markers = estimators::detect_waves(series_of(snap, region), options);
        return {200, waves_payload(region, markers).dump()};
    }

    ApiResponse growth(const ingest::Snapshot& snap, const RegionKey& region, const Query& q) const {
        const auto& s = series_of(snap, region);
        const DateRange window{date_param(q, "from").value_or(s.start), date_param(q, "to").value_or(s.end())};
        if (window.to < window.from) {
            throw Error(Errc::InvalidParameter, "from must not be after to");
        }
        return {200, growth_payload(estimators::fit_growth(s, window)).dump()};
    }

    ApiResponse indicators(const ingest::Snapshot& snap, const RegionKey& region) const {
        const auto* pop = snap.find_population(region.code);
        if (!pop) throw Error(Errc::InsufficientData, "no population for '" + region.code + "'");
        const auto& s = series_of(snap, region);
        return {200, indicators_payload(region, *pop, estimators::indicators(s, *pop)).dump()};
    }

    ApiConfig config_;
    Logger log_;
    projector::SerialInterval si_;
    SnapshotStore store_;
    mutable ResponseCache cache_;
    std::mutex refresh_mutex_;
};

}  // namespace epiwatch::service
