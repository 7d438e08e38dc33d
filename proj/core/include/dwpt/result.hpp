#pragma once

#include <string>
#include <utility>
#include <variant>

namespace dwpt {

/// Protocol-level rejection causes. Rejection is a normal outcome of a
/// run, not an exception; precondition violations throw instead.
enum class Reject {
    AuthenticationFailed,
    DoubleSpendRejected,
    UnknownPseudonym,
    CredentialsExhausted,
    RegistrationRejected,
    ProtocolError,
};

std::string reject_name(Reject r);

struct RejectReason {
    Reject code;
    std::string detail;
};

template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Reject code, std::string detail = {})
        : v_(RejectReason{code, std::move(detail)}) {}
    Result(RejectReason reason) : v_(std::move(reason)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }
    const RejectReason& error() const { return std::get<RejectReason>(v_); }

private:
    std::variant<T, RejectReason> v_;
};

struct Accepted {};

}  // namespace dwpt
