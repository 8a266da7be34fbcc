#include "fdplens/service.hpp"

#include <cmath>
#include <deque>
#include <future>
#include <mutex>
#include <random>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fdplens/hommel.hpp"
#include "fdplens/input.hpp"
#include "fdplens/report.hpp"
#include "fdplens/selection.hpp"

namespace fdplens::service {

using nlohmann::json;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;
using ContextPtr = std::shared_ptr<const HommelContext>;

struct Service::Session {
    std::shared_ptr<const PValueStudy> study;
    bool pinned = false;
    std::atomic<Clock::rep> last_access{0};

    // Single-flight cache: the first requester of an alpha computes, later
    // ones wait on the same future.
    std::mutex cache_mu;
    std::map<double, std::shared_future<ContextPtr>> cache;
    std::deque<double> cache_order;
};

namespace {

// Status-carrying failure inside a handler.
struct HttpError {
    int status;
    std::string message;
};

Response json_response(int status, const ordered_json& body) { return Response{status, body.dump(), "application/json"}; }

Response error_response(int status, const std::string& message) {
    return json_response(status, ordered_json{{"error", message}});
}

std::string new_session_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}() ^
                                            static_cast<std::uint64_t>(Clock::now().time_since_epoch().count())};
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                  static_cast<unsigned long long>(gen()));
    return buf;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start < path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string::npos ? path.size() : slash;
        if (end > start) parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

json parse_body(const std::string& body) {
    try {
        json doc = json::parse(body);
        if (!doc.is_object()) throw HttpError{400, "request body must be a JSON object"};
        return doc;
    } catch (const json::parse_error& e) {
        throw HttpError{400, std::string("malformed JSON: ") + e.what()};
    }
}

double alpha_field(const json& body) {
    if (!body.contains("alpha")) throw HttpError{400, "missing 'alpha'"};
    if (!body["alpha"].is_number()) throw HttpError{400, "'alpha' must be a number"};
    const double alpha = body["alpha"].get<double>();
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw HttpError{422, "alpha must lie in [0, 1]"};
    return alpha;
}

std::size_t count_value(const json& v, const char* what) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) {
        if (v.get<long long>() < 0) throw HttpError{422, std::string(what) + " must be nonnegative"};
        return static_cast<std::size_t>(v.get<long long>());
    }
    throw HttpError{400, std::string(what) + " must be an integer"};
}

// Exactly one of indices, rank_range, threshold, ids.
SubsetSelection selection_from_body(const json& body, const PValueStudy& study) {
    const std::size_t m = study.size();
    int given = 0;
    for (const char* key : {"indices", "rank_range", "threshold", "ids"}) given += body.contains(key) ? 1 : 0;
    if (given != 1) throw HttpError{400, "give exactly one of 'indices', 'rank_range', 'threshold', 'ids'"};

    try {
        if (body.contains("indices")) {
            const auto& arr = body["indices"];
            if (!arr.is_array()) throw HttpError{400, "'indices' must be an array"};
            std::vector<std::size_t> idx;
            idx.reserve(arr.size());
            for (const auto& v : arr) {
                const std::size_t i = count_value(v, "index");
                if (i == 0 || i > m) throw HttpError{422, "index " + std::to_string(i) + " outside 1.." + std::to_string(m)};
                idx.push_back(i - 1);
            }
            try {
                return SubsetSelection::from_indices(std::move(idx), m);
            } catch (const std::invalid_argument&) {
                throw HttpError{422, "index listed twice"};
            }
        }
        if (body.contains("rank_range")) {
            const auto& r = body["rank_range"];
            if (!r.is_object() || !r.contains("from") || !r.contains("to")) {
                throw HttpError{400, "'rank_range' must be {\"from\": a, \"to\": b}"};
            }
            const std::size_t from = count_value(r["from"], "rank");
            const std::size_t to = count_value(r["to"], "rank");
            return resolve(SetSpec::rank_range(from, to), study);
        }
        if (body.contains("threshold")) {
            if (!body["threshold"].is_number()) throw HttpError{400, "'threshold' must be a number"};
            return resolve(SetSpec::at_most(body["threshold"].get<double>()), study);
        }
        const auto& arr = body["ids"];
        if (!arr.is_array()) throw HttpError{400, "'ids' must be an array"};
        std::vector<std::string> ids;
        for (const auto& v : arr) {
            if (!v.is_string()) throw HttpError{400, "'ids' must hold strings"};
            ids.push_back(v.get<std::string>());
        }
        return resolve(SetSpec::of_ids(std::move(ids)), study);
    } catch (const ResolutionError& e) {
        throw HttpError{422, e.what()};
    }
}

PValueStudy study_from_upload(const std::string& body) {
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '{') {
        const json doc = parse_body(body);
        if (!doc.contains("p") || !doc["p"].is_array()) throw HttpError{400, "'p' must be an array of numbers"};
        std::vector<double> p;
        p.reserve(doc["p"].size());
        for (const auto& v : doc["p"]) {
            if (!v.is_number()) throw HttpError{400, "'p' must be an array of numbers"};
            p.push_back(v.get<double>());
        }
        try {
            if (!doc.contains("ids")) return PValueStudy::from_pvalues(std::move(p));
            if (!doc["ids"].is_array()) throw HttpError{400, "'ids' must be an array of strings"};
            std::vector<std::string> ids;
            for (const auto& v : doc["ids"]) {
                if (!v.is_string()) throw HttpError{400, "'ids' must be an array of strings"};
                ids.push_back(v.get<std::string>());
            }
            return PValueStudy(std::move(ids), std::move(p));
        } catch (const std::invalid_argument& e) {
            throw HttpError{400, e.what()};
        }
    }
    try {
        return parse_table(body);
    } catch (const ParseError& e) {
        throw HttpError{400, e.what()};
    }
}

ordered_json study_json(const std::string& sid, const PValueStudy& study) {
    return ordered_json{{"session_id", sid}, {"m", study.size()}, {"ids", study.ids()}, {"p", study.p()}};
}

} // namespace

Service::Service(ServiceOptions opts) : opts_(std::move(opts)) {}
Service::~Service() = default;

std::string Service::add_study(PValueStudy study, bool pinned) {
    auto session = std::make_shared<Session>();
    session->study = std::make_shared<const PValueStudy>(std::move(study));
    session->pinned = pinned;
    session->last_access = opts_.clock().time_since_epoch().count();
    std::unique_lock lock(mu_);
    std::string sid;
    do {
        sid = new_session_id();
    } while (sessions_.count(sid));
    sessions_.emplace(sid, std::move(session));
    return sid;
}

std::string Service::preload(PValueStudy study) {
    std::string sid = add_study(std::move(study), true);
    std::unique_lock lock(mu_);
    preloaded_ = sid;
    return sid;
}

std::size_t Service::session_count() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
}

std::size_t Service::evict_expired() {
    const auto now = opts_.clock().time_since_epoch().count();
    const auto ttl = std::chrono::duration_cast<Clock::duration>(opts_.ttl).count();
    std::unique_lock lock(mu_);
    std::size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (!it->second->pinned && now - it->second->last_access.load() > ttl) {
            it = sessions_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

std::shared_ptr<Service::Session> Service::find(const std::string& sid) {
    std::shared_lock lock(mu_);
    const auto it = sessions_.find(sid);
    if (it == sessions_.end()) throw HttpError{404, "unknown session '" + sid + "'"};
    it->second->last_access = opts_.clock().time_since_epoch().count();
    return it->second;
}

Response Service::handle(const Request& req) {
    // Sweep at most once per minute (or per TTL when shorter).
    const auto now = opts_.clock().time_since_epoch().count();
    const auto period = std::chrono::duration_cast<Clock::duration>(
                            std::min<std::chrono::seconds>(opts_.ttl, std::chrono::seconds(60)))
                            .count();
    auto last = last_sweep_.load();
    if (now - last >= period && last_sweep_.compare_exchange_strong(last, now)) evict_expired();

    try {
        return route(req);
    } catch (const HttpError& e) {
        return error_response(e.status, e.message);
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

Response Service::route(const Request& req) {
    if (req.method == "OPTIONS") return Response{204, "", "text/plain"};
    const auto parts = split_path(req.path);
    const auto method_not_allowed = [] { return error_response(405, "method not allowed"); };

    if (parts.size() == 1 && parts[0] == "health") {
        if (req.method != "GET") return method_not_allowed();
        return json_response(200, ordered_json{{"status", "ok"}, {"sessions", session_count()}});
    }
    if (parts.size() == 1 && parts[0] == "study") {
        if (req.method != "GET") return method_not_allowed();
        std::string sid;
        {
            std::shared_lock lock(mu_);
            if (!preloaded_) throw HttpError{404, "no study was preloaded"};
            sid = *preloaded_;
        }
        return json_response(200, study_json(sid, *find(sid)->study));
    }
    if (parts.empty() || parts[0] != "studies") throw HttpError{404, "no such route"};

    if (parts.size() == 1) {
        if (req.method != "POST") return method_not_allowed();
        PValueStudy study = study_from_upload(req.body);
        if (study.size() > opts_.max_m) {
            throw HttpError{413, "study has " + std::to_string(study.size()) + " hypotheses; the limit is " +
                                     std::to_string(opts_.max_m)};
        }
        const std::size_t m = study.size();
        const std::string sid = add_study(std::move(study));
        return json_response(201, ordered_json{{"session_id", sid}, {"m", m}});
    }

    const std::string& sid = parts[1];
    if (parts.size() == 2) {
        if (req.method == "GET") return json_response(200, study_json(sid, *find(sid)->study));
        if (req.method == "DELETE") {
            std::unique_lock lock(mu_);
            const auto it = sessions_.find(sid);
            if (it == sessions_.end()) throw HttpError{404, "unknown session '" + sid + "'"};
            if (it->second->pinned) throw HttpError{405, "the preloaded study cannot be deleted"};
            sessions_.erase(it);
            return Response{204, "", "text/plain"};
        }
        return method_not_allowed();
    }
    if (parts.size() != 3) throw HttpError{404, "no such route"};

    const auto session = find(sid);
    const PValueStudy& study = *session->study;

    const auto context = [&](double alpha) -> ContextPtr {
        std::promise<ContextPtr> promise;
        std::shared_future<ContextPtr> future;
        bool owner = false;
        {
            std::lock_guard lock(session->cache_mu);
            const auto it = session->cache.find(alpha);
            if (it != session->cache.end()) {
                future = it->second;
            } else {
                future = promise.get_future().share();
                session->cache.emplace(alpha, future);
                session->cache_order.push_back(alpha);
                while (session->cache_order.size() > opts_.contexts_per_session) {
                    session->cache.erase(session->cache_order.front());
                    session->cache_order.pop_front();
                }
                owner = true;
            }
        }
        if (owner) {
            try {
                promise.set_value(std::make_shared<const HommelContext>(HommelContext::compute(study, alpha)));
                ++computed_;
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return future.get();
    };

    const std::string& action = parts[2];
    if (action == "summary") {
        if (req.method != "GET") return method_not_allowed();
        const auto it = req.query.find("alpha");
        if (it == req.query.end()) throw HttpError{400, "missing query parameter 'alpha'"};
        double alpha = 0.0;
        if (!parse_number(it->second, alpha)) throw HttpError{400, "alpha must be a number"};
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw HttpError{422, "alpha must lie in [0, 1]"};
        const auto ctx = context(alpha);
        ordered_json out = summary_json(study, *ctx);
        ordered_json ids = ordered_json::array();
        for (std::size_t k = 0; k < ctx->z(); ++k) ids.push_back(study.ids()[study.order()[k]]);
        out["concentration_ids"] = std::move(ids);
        return json_response(200, out);
    }
    if (action == "bound") {
        if (req.method != "POST") return method_not_allowed();
        const json body = parse_body(req.body);
        const double alpha = alpha_field(body);
        const SubsetSelection S = selection_from_body(body, study);
        return json_response(200, bound_json(discoveries(study, S, *context(alpha))));
    }
    if (action == "min-alpha") {
        if (req.method != "POST") return method_not_allowed();
        const json body = parse_body(req.body);
        const SubsetSelection S = selection_from_body(body, study);
        if (!body.contains("k")) throw HttpError{400, "missing 'k'"};
        const std::size_t k = count_value(body["k"], "k");
        double tol = 1e-6;
        if (body.contains("tol")) {
            if (!body["tol"].is_number()) throw HttpError{400, "'tol' must be a number"};
            tol = body["tol"].get<double>();
        }
        if (k > S.size()) throw HttpError{422, "k exceeds the size of the set"};
        if (!(tol > 0.0 && tol < 1.0)) throw HttpError{422, "tol must lie in (0, 1)"};
        const auto alpha = min_alpha_for(study, S, k, tol);
        if (!alpha) return json_response(200, ordered_json{{"alpha", nullptr}, {"attainable", false}});
        return json_response(200, ordered_json{{"alpha", *alpha}, {"attainable", true}});
    }
    throw HttpError{404, "no such route"};
}

struct Server::Impl {
    httplib::Server http;
};

Server::Server(Service& service) : impl_(std::make_unique<Impl>()) {
    auto& http = impl_->http;
    http.set_payload_max_length(std::size_t{1} << 31);
    // The library default adds SO_REUSEPORT, which would let a second server
    // share a busy port instead of failing to bind.
    http.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
    const auto forward = [&service](const httplib::Request& in, httplib::Response& out) {
        Request req{in.method, in.path, {}, in.body};
        for (const auto& [k, v] : in.params) req.query.emplace(k, v);
        const Response res = service.handle(req);
        out.status = res.status;
        out.set_header("Access-Control-Allow-Origin", "*");
        out.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        out.set_header("Access-Control-Allow-Headers", "Content-Type");
        if (!res.body.empty()) out.set_content(res.body, res.content_type);
    };
    http.Get(".*", forward);
    http.Post(".*", forward);
    http.Delete(".*", forward);
    http.Options(".*", forward);
}

Server::~Server() = default;

bool Server::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->http.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->http.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

} // namespace fdplens::service
