#pragma once

#include <cassert>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace ecoagent {

enum class Errc {
  UnknownActionKeyword,
  MissingSection,
  MalformedPlanJson,
  EmptyPlan,
  StepKeyGap,
  UnparseableAction,
  UnparseableVerdict,
  RuleMiss,
  ProviderUnavailable,
  MalformedProviderResponse,
  PlanningFailed,
  ReplanningFailed,
  GroundingFailed,
  SummarizationFailed,
  VerificationFailed,
  FixtureInvalid,
  UnknownApp,
  ConfigInvalid,
  TraceInvalid,
};

std::string_view errc_name(Errc code);

struct Error {
  Errc code;
  std::string detail;

  std::string to_string() const {
    std::string s{errc_name(code)};
    if (!detail.empty()) {
      s += ": ";
      s += detail;
    }
    return s;
  }
};

inline Error make_error(Errc code, std::string detail = {}) {
  return Error{code, std::move(detail)};
}

/// Value-or-Error carrier used by every fallible operation. Accessing the
/// wrong alternative throws std::logic_error rather than UB.
template <typename T>
class Result {
public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error error) : v_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    require(ok(), "Result::value() on error");
    return std::get<T>(v_);
  }
  const T& value() const {
    require(ok(), "Result::value() on error");
    return std::get<T>(v_);
  }
  const Error& error() const {
    require(!ok(), "Result::error() on value");
    return std::get<Error>(v_);
  }

private:
  static void require(bool cond, const char* msg) {
    if (!cond) throw std::logic_error(msg);
  }

  std::variant<T, Error> v_;
};

}  // namespace ecoagent
