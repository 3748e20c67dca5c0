#pragma once

#include "epiwatch/service/api.hpp"
#include "epiwatch/service/config.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>

namespace epiwatch::service {

/// HTTP front end over an Api, plus the optional periodic refresh loop.
class Server {
public:
    explicit Server(Api& api) : api_(api) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            Query query;
            for (const auto& [k, v] : req.params) query.emplace(k, v);
            const auto origin = req.get_header_value("Origin");
            const auto out = api_.handle(req.method, req.path, query, origin);
            res.status = out.status;
            for (const auto& [k, v] : out.headers) res.set_header(k, v);
            if (out.status != 204) res.set_content(out.body, out.content_type);
        };
        http_.Get(R"(/.*)", handler);
        http_.Options(R"(/.*)", handler);
        // Read-only API: other methods reach the Api so they get its 405.
        http_.Post(R"(/.*)", handler);
        http_.Put(R"(/.*)", handler);
        http_.Patch(R"(/.*)", handler);
        http_.Delete(R"(/.*)", handler);
    }

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    ~Server() { stop(); }

    /// Binds host:port; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return http_.bind_to_any_port(host);
        return http_.bind_to_port(host, port) ? port : -1;
    }

    /// Serves until stop(); call after bind().
    bool listen() { return http_.listen_after_bind(); }

    void start_refresh_loop(unsigned interval_seconds) {
        if (interval_seconds == 0) return;
        refresher_ = std::jthread([this, interval_seconds](std::stop_token token) {
            std::mutex m;
            std::condition_variable_any cv;
            std::unique_lock lock(m);
            while (!token.stop_requested()) {
                cv.wait_for(lock, token, std::chrono::seconds(interval_seconds), [] { return false; });
                if (token.stop_requested()) break;
                api_.refresh();
            }
        });
    }

    void stop() {
        if (refresher_.joinable()) {
            refresher_.request_stop();
            refresher_.join();
        }
        http_.stop();
    }

    bool running() const { return http_.is_running(); }
    void wait_until_ready() const { http_.wait_until_ready(); }

private:
    Api& api_;
    httplib::Server http_;
    std::jthread refresher_;
};

}  // namespace epiwatch::service
