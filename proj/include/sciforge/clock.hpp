#pragma once

#include <atomic>
#include <cstdint>

namespace sciforge {

// Time source used by the gateway so retry/backoff behavior is testable
// without real waiting.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
public:
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
};

// Deterministic clock: sleeping advances time instantly.
class VirtualClock : public Clock {
public:
    explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
    std::int64_t now_ms() override { return now_.load(); }
    void sleep_ms(std::int64_t ms) override {
        if (ms > 0) now_.fetch_add(ms);
    }

private:
    std::atomic<std::int64_t> now_;
};

} // namespace sciforge
