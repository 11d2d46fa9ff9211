#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sciforge/clock.hpp"
#include "sciforge/errors.hpp"

namespace sciforge {

struct ChatMessage {
    std::string role; // "system" | "user" | "assistant"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 2048;

    // Canonical JSON form; hashing it keys the record/replay cassette.
    nlohmann::json canonical() const;
    std::string hash() const;

    const std::string& last_user_content() const;
};

struct ChatResponse {
    std::string content;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    bool truncated = false; // response was cut off at the token limit
};

// A completion provider. Implementations throw Error(TransportError) for
// failures worth retrying (connection loss, 429, 5xx — HTTP status in arg)
// and Error(NonRetryable) for permanent ones (other 4xx, garbage payloads).
class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

// Canned backend driven by a JSON script, for offline runs and tests:
//   {"sequence": ["first reply", ...],              // consumed in order
//    "rules": [{"if_contains": "substr", "respond": "..."},
//              {"if_contains_all": ["a", "b"], "respond": "..."}],
//    "default": "fallback reply"}
// After the sequence is exhausted, rules are matched in order against the
// last user message; with no match and no default, throws
// Error(MockExhausted). Thread-safe; keeps a log of every request served.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(const nlohmann::json& script);
    static nlohmann::json load_script(const std::string& path);

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "mock"; }

    std::vector<ChatRequest> requests_seen() const;
    std::size_t call_count() const;

private:
    struct Rule {
        std::vector<std::string> needles; // all must appear
        std::string reply;
    };
    std::vector<std::string> sequence_;
    std::vector<Rule> rules_;
    std::optional<std::string> default_reply_;

    mutable std::mutex mu_;
    std::size_t sequence_pos_ = 0;
    std::vector<ChatRequest> log_;
};

// Replays responses from a cassette (JSONL of
// {"request_hash", "request", "response"}) keyed by request hash. Misses
// throw Error(MockExhausted).
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& cassette_path);
    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "replay"; }
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, ChatResponse> entries_;
};

// Wraps another backend and appends every successful exchange to a cassette
// file, so a live run can later be replayed bit-for-bit.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::string cassette_path);
    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return inner_->id() + "+record"; }

private:
    std::shared_ptr<Backend> inner_;
    std::string cassette_path_;
    std::mutex mu_;
};

// Talks to an OpenAI-style chat completions endpoint over HTTP(S).
class HttpBackend : public Backend {
public:
    HttpBackend(std::string endpoint, std::string model, std::string api_key,
                int timeout_seconds = 60);
    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "http"; }

private:
    std::string scheme_, host_, path_;
    int port_ = 0;
    std::string model_, api_key_;
    int timeout_seconds_;
};

// Sliding-window limiter: at most `limit` issues in any 60-second window.
// acquire() blocks (via the clock) until a slot frees up. The issue log is
// exposed so tests can assert the window property directly.
class RateLimiter {
public:
    RateLimiter(std::size_t limit, std::shared_ptr<Clock> clock);
    void acquire();
    std::vector<std::int64_t> issue_log() const;

    static constexpr std::int64_t kWindowMs = 60'000;

private:
    std::size_t limit_;
    std::shared_ptr<Clock> clock_;
    mutable std::mutex mu_;
    std::deque<std::int64_t> window_;
    std::vector<std::int64_t> log_;
};

struct GatewaySettings {
    int max_retries = 3;           // extra attempts after the first
    std::int64_t base_backoff_ms = 250;
    std::size_t requests_per_minute = 60;
    std::size_t max_in_flight = 4; // batch worker cap
};

// Per-request outcome of a batch; exactly one of response/error is set.
struct BatchResult {
    std::optional<ChatResponse> response;
    std::optional<Errc> error;
    std::string error_message;
    bool ok() const { return response.has_value(); }
};

// Front door to a backend: rate limiting, bounded retries with exponential
// backoff, and bounded-parallelism batching. Every attempt (including
// retries) consumes a rate-limit slot.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewaySettings settings,
            std::shared_ptr<Clock> clock = std::make_shared<SystemClock>());

    ChatResponse complete(const ChatRequest& request);

    // Results are positionally aligned with the inputs. Individual failures
    // land in their slot; they never abort the rest of the batch.
    std::vector<BatchResult> complete_batch(const std::vector<ChatRequest>& requests);

    std::uint64_t attempts() const { return attempts_.load(); }
    const RateLimiter& rate_limiter() const { return limiter_; }
    Backend& backend() { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    GatewaySettings settings_;
    std::shared_ptr<Clock> clock_;
    RateLimiter limiter_;
    std::atomic<std::uint64_t> attempts_{0};
};

} // namespace sciforge
