#pragma once

#include <chrono>
#include <cstdint>
#include <memory>

namespace ecoagent {

/// Episode time source. The virtual clock advances only when told (by the
/// providers' synthetic latencies), which makes latency comparisons exact
/// and repeatable; the real clock measures wall time and ignores advance().
class Clock {
public:
  virtual ~Clock() = default;
  virtual std::int64_t now_us() = 0;
  virtual void advance_us(std::int64_t us) = 0;
};

class VirtualClock : public Clock {
public:
  std::int64_t now_us() override { return now_; }
  void advance_us(std::int64_t us) override { now_ += us; }

private:
  std::int64_t now_ = 0;
};

class RealClock : public Clock {
public:
  std::int64_t now_us() override {
    auto d = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration_cast<std::chrono::microseconds>(d).count();
  }
  void advance_us(std::int64_t) override {}
};

}  // namespace ecoagent
