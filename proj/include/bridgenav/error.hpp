#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace bridgenav {

enum class ErrorCode {
  kInvalidInput,
  kDegenerate,
  kUnreachable,
  kBudgetExhausted,
  kCollision,
  kInfeasible,
  kUnschedulable,
};

const char* to_string(ErrorCode code);

struct Error {
  ErrorCode code;
  std::string message;
};

// Thrown by accessors when an Outcome holding an error is dereferenced, and
// by functions whose preconditions are violated by the caller.
class BridgeError : public std::runtime_error {
 public:
  explicit BridgeError(Error e)
      : std::runtime_error(std::string(to_string(e.code)) + ": " + e.message), error_(std::move(e)) {}
  const Error& error() const { return error_; }

 private:
  Error error_;
};

// Either a value or an Error. Failure values are part of the normal contract
// of planners (RRT budget exhaustion, unreachable connections, ...).
template <typename T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Error error) : v_(std::move(error)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw BridgeError(std::get<1>(v_));
    return std::get<0>(v_);
  }
  T& value() & {
    if (!ok()) throw BridgeError(std::get<1>(v_));
    return std::get<0>(v_);
  }
  T&& value() && {
    if (!ok()) throw BridgeError(std::get<1>(v_));
    return std::get<0>(std::move(v_));
  }
  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

  const Error& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, Error> v_;
};

inline Error make_error(ErrorCode code, std::string message) { return Error{code, std::move(message)}; }

}  // namespace bridgenav
