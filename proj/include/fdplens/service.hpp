#pragma once
// HTTP/JSON session layer. A client uploads a study once and then issues any
// number of bound queries against it.
//
//   POST   /studies                      CSV/TSV text or {"ids"?: [...], "p": [...]}
//   GET    /studies/{sid}                the stored table
//   DELETE /studies/{sid}
//   GET    /studies/{sid}/summary?alpha= h, z, pi_hat, r_size, b, concentration ids
//   POST   /studies/{sid}/bound          {"alpha", one of indices | rank_range | threshold | ids}
//   POST   /studies/{sid}/min-alpha      {selection as above, "k", "tol"?}
//   GET    /study                        the study preloaded at startup
//   GET    /health
//
// Indices on the wire are 1-based positions in the uploaded table.
// Errors: 400 malformed body, 404 unknown session, 422 invalid set or level.
//
// Service::handle is a pure request -> response function; Server only binds
// it to a socket.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "fdplens/study.hpp"

namespace fdplens::service {

struct Request {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ServiceOptions {
    std::chrono::seconds ttl{3600};
    std::size_t max_m = 10'000'000;
    std::size_t contexts_per_session = 64;   // oldest alpha evicted beyond this
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

class Service {
public:
    explicit Service(ServiceOptions opts = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Stores a study and returns its session id. Pinned sessions never expire.
    std::string add_study(PValueStudy study, bool pinned = false);
    // Registers the study served by GET /study; pinned.
    std::string preload(PValueStudy study);

    Response handle(const Request& req);

    // Drops sessions idle for longer than the TTL; returns how many.
    std::size_t evict_expired();
    std::size_t session_count() const;
    // Number of Hommel contexts computed so far, across sessions.
    std::size_t contexts_computed() const noexcept { return computed_.load(); }

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& sid);
    Response route(const Request& req);

    ServiceOptions opts_;
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::optional<std::string> preloaded_;
    std::atomic<std::size_t> computed_{0};
    std::atomic<std::chrono::steady_clock::rep> last_sweep_{0};
};

// Every response carries permissive CORS headers for the browser explorer.
class Server {
public:
    explicit Server(Service& service);
    ~Server();

    // False when the address cannot be bound (port in use). Port 0 picks a
    // free port; see port().
    bool bind(const std::string& host, int port);
    int port() const noexcept { return port_; }
    // Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

} // namespace fdplens::service
