#include "epiwatch/cli/app.hpp"
#include "epiwatch/service/server.hpp"

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

namespace {

int serve(const epiwatch::service::ApiConfig& config, std::ostream& out, std::ostream& err) {
    using namespace epiwatch;
    // Block termination signals before any thread starts so only the waiter sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::Api api(config);
    if (!api.refresh()) {
        err << "initial load of " << config.data_dir << " failed\n";
        return cli::kExitDataError;
    }
    const auto hp = service::split_bind_address(config.bind_address);
    service::Server server(api);
    const int port = server.bind(hp.host, hp.port);
    if (port < 0) {
        err << "cannot bind " << config.bind_address << '\n';
        return cli::kExitDataError;
    }
    out << "listening on " << hp.host << ':' << port << std::endl;
    server.start_refresh_loop(config.refresh_interval);

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return epiwatch::cli::run(args, std::cout, std::cerr, serve);
}
