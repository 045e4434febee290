#include <thread>

#include <httplib.h>

#include "claimguard/factcheck/factcheck.hpp"

namespace claimguard::factcheck {

struct MockFactCheckServer::Impl {
    httplib::Server server;
    std::thread worker;
    int port = 0;
    mutable std::mutex mutex;
    FixtureSet fixtures;
    std::size_t requests = 0;
    std::string last_key;
};

MockFactCheckServer::MockFactCheckServer(FixtureSet fixtures) : impl_(std::make_unique<Impl>()) {
    impl_->fixtures = std::move(fixtures);
    auto* impl = impl_.get();
    impl->server.Get("/v1alpha1/claims:search", [impl](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(impl->mutex);
        ++impl->requests;
        impl->last_key = req.has_param("key") ? req.get_param_value("key") : "";
        if (!req.has_param("query")) {
            res.status = 400;
            res.set_content(R"({"error":"missing query"})", "application/json");
            return;
        }
        const auto& r = impl->fixtures.lookup(req.get_param_value("query"));
        res.status = r.status;
        res.set_content(r.body, "application/json");
    });
    impl->port = impl->server.bind_to_any_port("127.0.0.1");
    if (impl->port <= 0) throw Error("mock fact-check server could not bind a port");
    impl->worker = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
}

MockFactCheckServer::~MockFactCheckServer() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

std::string MockFactCheckServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1alpha1/claims:search";
}

void MockFactCheckServer::set_fixtures(FixtureSet fixtures) {
    std::lock_guard lock(impl_->mutex);
    impl_->fixtures = std::move(fixtures);
}

std::size_t MockFactCheckServer::requests() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->requests;
}

std::string MockFactCheckServer::last_key() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->last_key;
}

} // namespace claimguard::factcheck
