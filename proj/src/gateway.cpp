#include "sciforge/gateway.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#ifdef SCIFORGE_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "sciforge/util.hpp"

namespace sciforge {

// ---------------------------------------------------------------------------
// Clocks

std::int64_t SystemClock::now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

// ---------------------------------------------------------------------------
// ChatRequest

nlohmann::json ChatRequest::canonical() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return nlohmann::json{{"model", model},
                          {"messages", msgs},
                          {"temperature", temperature},
                          {"max_tokens", max_tokens}};
}

std::string ChatRequest::hash() const { return util::to_hex(util::fnv1a64(canonical().dump())); }

const std::string& ChatRequest::last_user_content() const {
    static const std::string empty;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role == "user") return it->content;
    return empty;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(const nlohmann::json& script) {
    if (script.contains("sequence"))
        for (const auto& s : script.at("sequence")) sequence_.push_back(s.get<std::string>());
    if (script.contains("rules")) {
        for (const auto& r : script.at("rules")) {
            Rule rule;
            if (r.contains("if_contains"))
                rule.needles.push_back(r.at("if_contains").get<std::string>());
            else if (r.contains("if_contains_all"))
                for (const auto& n : r.at("if_contains_all"))
                    rule.needles.push_back(n.get<std::string>());
            else
                throw Error(Errc::InvalidArgument,
                            "script rule needs if_contains or if_contains_all");
            rule.reply = r.at("respond").get<std::string>();
            rules_.push_back(std::move(rule));
        }
    }
    if (script.contains("default")) default_reply_ = script.at("default").get<std::string>();
}

nlohmann::json ScriptedBackend::load_script(const std::string& path) {
    try {
        return nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, "bad backend script " + path + ": " + e.what());
    }
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(request);

    std::string reply;
    bool found = false;
    if (sequence_pos_ < sequence_.size()) {
        reply = sequence_[sequence_pos_++];
        found = true;
    } else {
        const std::string& probe = request.last_user_content();
        for (const auto& rule : rules_) {
            bool all = true;
            for (const auto& needle : rule.needles)
                if (probe.find(needle) == std::string::npos) {
                    all = false;
                    break;
                }
            if (all) {
                reply = rule.reply;
                found = true;
                break;
            }
        }
        if (!found && default_reply_) {
            reply = *default_reply_;
            found = true;
        }
    }
    if (!found)
        throw Error(Errc::MockExhausted, "script has no reply for request (call " +
                                             std::to_string(log_.size()) + ")");

    ChatResponse resp;
    resp.content = reply;
    resp.prompt_tokens = 0;
    resp.completion_tokens = 0;
    return resp;
}

std::vector<ChatRequest> ScriptedBackend::requests_seen() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_.size();
}

// ---------------------------------------------------------------------------
// Cassettes

namespace {
ChatResponse response_from_json(const nlohmann::json& j) {
    ChatResponse r;
    r.content = j.at("content").get<std::string>();
    r.prompt_tokens = j.value("prompt_tokens", std::int64_t(0));
    r.completion_tokens = j.value("completion_tokens", std::int64_t(0));
    r.truncated = j.value("truncated", false);
    return r;
}

nlohmann::json response_to_json(const ChatResponse& r) {
    return nlohmann::json{{"content", r.content},
                          {"prompt_tokens", r.prompt_tokens},
                          {"completion_tokens", r.completion_tokens},
                          {"truncated", r.truncated}};
}
} // namespace

ReplayBackend::ReplayBackend(const std::string& cassette_path) {
    std::string text = util::read_file(cassette_path);
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(text)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            entries_[j.at("request_hash").get<std::string>()] =
                response_from_json(j.at("response"));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::ConfigError, "bad cassette line " + std::to_string(line_no) + ": " +
                                               e.what());
        }
    }
}

ChatResponse ReplayBackend::complete(const ChatRequest& request) {
    auto it = entries_.find(request.hash());
    if (it == entries_.end())
        throw Error(Errc::MockExhausted, "cassette has no entry for request " + request.hash());
    return it->second;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::string cassette_path)
    : inner_(std::move(inner)), cassette_path_(std::move(cassette_path)) {}

ChatResponse RecordingBackend::complete(const ChatRequest& request) {
    ChatResponse resp = inner_->complete(request);
    nlohmann::json line{{"request_hash", request.hash()},
                        {"request", request.canonical()},
                        {"response", response_to_json(resp)}};
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(cassette_path_, std::ios::app);
    if (!out) throw Error(Errc::IoError, "cannot append to cassette " + cassette_path_);
    out << line.dump() << '\n';
    return resp;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(std::string endpoint, std::string model, std::string api_key,
                         int timeout_seconds)
    : model_(std::move(model)), api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    std::string rest;
    if (endpoint.rfind("https://", 0) == 0) {
        scheme_ = "https";
        rest = endpoint.substr(8);
        port_ = 443;
    } else if (endpoint.rfind("http://", 0) == 0) {
        scheme_ = "http";
        rest = endpoint.substr(7);
        port_ = 80;
    } else {
        throw Error(Errc::ConfigError, "endpoint must start with http:// or https://");
    }
    std::size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon != std::string::npos) {
        host_ = hostport.substr(0, colon);
        port_ = std::stoi(hostport.substr(colon + 1));
    } else {
        host_ = hostport;
    }
    if (host_.empty()) throw Error(Errc::ConfigError, "endpoint has no host");
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
    nlohmann::json body = request.canonical();
    body["model"] = model_.empty() ? request.model : model_;

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    httplib::Result res;
    auto post = [&](auto& client) {
        client.set_connection_timeout(timeout_seconds_, 0);
        client.set_read_timeout(timeout_seconds_, 0);
        client.set_write_timeout(timeout_seconds_, 0);
        return client.Post(path_, headers, body.dump(), "application/json");
    };
#ifdef SCIFORGE_WITH_OPENSSL
    if (scheme_ == "https") {
        httplib::SSLClient client(host_, port_);
        res = post(client);
    } else {
        httplib::Client client(host_, port_);
        res = post(client);
    }
#else
    if (scheme_ == "https")
        throw Error(Errc::ConfigError, "built without TLS support; use an http:// endpoint");
    httplib::Client client(host_, port_);
    res = post(client);
#endif

    if (!res)
        throw Error(Errc::TransportError,
                    "connection to " + host_ + " failed: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw Error(Errc::TransportError, "endpoint returned " + std::to_string(res->status),
                    res->status);
    if (res->status != 200)
        throw Error(Errc::NonRetryable, "endpoint returned " + std::to_string(res->status),
                    res->status);

    try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        const auto& choice = j.at("choices").at(0);
        ChatResponse resp;
        resp.content = choice.at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            resp.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t(0));
            resp.completion_tokens = j["usage"].value("completion_tokens", std::int64_t(0));
        }
        resp.truncated = choice.value("finish_reason", std::string()) == "length";
        return resp;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::NonRetryable, std::string("malformed completion payload: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// RateLimiter

RateLimiter::RateLimiter(std::size_t limit, std::shared_ptr<Clock> clock)
    : limit_(limit), clock_(std::move(clock)) {
    if (limit_ == 0) throw Error(Errc::InvalidArgument, "rate limit must be positive");
}

void RateLimiter::acquire() {
    std::lock_guard<std::mutex> lock(mu_);
    std::int64_t now = clock_->now_ms();
    for (;;) {
        while (!window_.empty() && window_.front() <= now - kWindowMs) window_.pop_front();
        if (window_.size() < limit_) break;
        clock_->sleep_ms(window_.front() + kWindowMs - now);
        now = clock_->now_ms();
    }
    window_.push_back(now);
    log_.push_back(now);
}

std::vector<std::int64_t> RateLimiter::issue_log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewaySettings settings,
                 std::shared_ptr<Clock> clock)
    : backend_(std::move(backend)),
      settings_(settings),
      clock_(std::move(clock)),
      limiter_(settings.requests_per_minute, clock_) {}

ChatResponse Gateway::complete(const ChatRequest& request) {
    for (int attempt = 0;; ++attempt) {
        limiter_.acquire();
        attempts_.fetch_add(1);
        try {
            return backend_->complete(request);
        } catch (const Error& e) {
            if (e.code() != Errc::TransportError || attempt >= settings_.max_retries) throw;
            clock_->sleep_ms(settings_.base_backoff_ms << attempt);
        }
    }
}

std::vector<BatchResult> Gateway::complete_batch(const std::vector<ChatRequest>& requests) {
    std::vector<BatchResult> results(requests.size());
    if (requests.empty()) return results;

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= requests.size()) return;
            try {
                results[i].response = complete(requests[i]);
            } catch (const Error& e) {
                results[i].error = e.code();
                results[i].error_message = e.what();
            } catch (const std::exception& e) {
                results[i].error = Errc::TransportError;
                results[i].error_message = e.what();
            }
        }
    };

    std::size_t n_workers = std::min(settings_.max_in_flight, requests.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

} // namespace sciforge
