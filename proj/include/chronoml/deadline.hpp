#pragma once

#include <chrono>

#include "chronoml/errors.hpp"

namespace chronoml {

// Cooperative deadline. Long-running fit loops call check() at least every
// ~100ms of work; expiry aborts the trial with TimedOutError.
class Deadline {
public:
    Deadline() = default;
    explicit Deadline(std::chrono::steady_clock::time_point hard) : hard_(hard), enabled_(true) {}

    static Deadline after(double seconds) {
        return Deadline(std::chrono::steady_clock::now() +
                        std::chrono::microseconds(static_cast<long long>(seconds * 1e6)));
    }

    bool enabled() const { return enabled_; }
    bool expired() const {
        return enabled_ && std::chrono::steady_clock::now() >= hard_;
    }
    void check() const {
        if (expired()) throw TimedOutError("evaluation deadline exceeded");
    }

private:
    std::chrono::steady_clock::time_point hard_{};
    bool enabled_ = false;
};

}  // namespace chronoml
