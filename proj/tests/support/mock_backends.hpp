#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>

#include "sciforge/errors.hpp"
#include "sciforge/gateway.hpp"

namespace testsupport {

// Wraps another backend and injects retryable transport failures with a
// seeded RNG. No single request ever sees more than `max_consecutive_failures`
// failures in a row (tracked per request hash, so concurrent interleaving
// cannot starve one request), which makes a retry budget of at least that
// many extra attempts guaranteed to succeed.
class FaultInjectingBackend : public sciforge::Backend {
public:
    FaultInjectingBackend(std::shared_ptr<sciforge::Backend> inner, std::uint64_t seed,
                          double fail_prob, int max_consecutive_failures)
        : inner_(std::move(inner)),
          rng_(seed),
          fail_prob_(fail_prob),
          max_consecutive_(max_consecutive_failures) {}

    sciforge::ChatResponse complete(const sciforge::ChatRequest& request) override {
        bool fail = false;
        {
            std::lock_guard<std::mutex> lock(mu_);
            int& consecutive = consecutive_by_request_[request.hash()];
            if (consecutive < max_consecutive_ &&
                std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < fail_prob_) {
                fail = true;
                ++consecutive;
                ++injected_;
            } else {
                consecutive = 0;
            }
        }
        if (fail)
            throw sciforge::Error(sciforge::Errc::TransportError, "injected fault", 503);
        return inner_->complete(request);
    }

    std::string id() const override { return "fault-injecting"; }

    int injected() const {
        std::lock_guard<std::mutex> lock(mu_);
        return injected_;
    }

private:
    std::shared_ptr<sciforge::Backend> inner_;
    mutable std::mutex mu_;
    std::mt19937_64 rng_;
    double fail_prob_;
    int max_consecutive_;
    std::unordered_map<std::string, int> consecutive_by_request_;
    int injected_ = 0;
};

// Wraps another backend and tracks how many calls overlap in time, so tests
// can assert the parallelism cap. An optional per-call sleep widens the
// window in which overlap can be observed.
class InstrumentedBackend : public sciforge::Backend {
public:
    explicit InstrumentedBackend(std::shared_ptr<sciforge::Backend> inner, int hold_ms = 0)
        : inner_(std::move(inner)), hold_ms_(hold_ms) {}

    sciforge::ChatResponse complete(const sciforge::ChatRequest& request) override {
        ++calls_;
        int now = ++in_flight_;
        int peak = peak_.load();
        while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
        }
        if (hold_ms_ > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(hold_ms_));
        try {
            sciforge::ChatResponse r = inner_->complete(request);
            --in_flight_;
            return r;
        } catch (...) {
            --in_flight_;
            throw;
        }
    }

    std::string id() const override { return "instrumented"; }

    int peak_concurrency() const { return peak_.load(); }
    int calls() const { return calls_.load(); }

private:
    std::shared_ptr<sciforge::Backend> inner_;
    int hold_ms_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_{0};
    std::atomic<int> calls_{0};
};

} // namespace testsupport
