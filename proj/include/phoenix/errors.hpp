#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace phoenix {

// Every way an operation can fail, across all layers. Rejections are normal
// outcomes of the state machine, not exceptions, so they travel as values.
enum class Error {
    // configuration / construction
    invalid_config,
    // ledger admission
    ledger_full,
    insufficient_funds,
    overflow,
    zero_amount,
    not_found,
    internal_overflow,
    // vault rule violations
    unauthorized,
    not_initiator,
    too_early,
    locked,
    already_privileged,
    unlock_not_increased,
    non_empty_destroy,
    destroyed,
    zero_address,
    self_recipient,
    // chain / trace
    replay_divergence,
    parse_error,
    // explorer
    budget_exceeded,
    // scenarios
    scenario_assertion_failed,
};

inline const char* error_name(Error e) {
    switch (e) {
    case Error::invalid_config: return "invalid_config";
    case Error::ledger_full: return "ledger_full";
    case Error::insufficient_funds: return "insufficient_funds";
    case Error::overflow: return "overflow";
    case Error::zero_amount: return "zero_amount";
    case Error::not_found: return "not_found";
    case Error::internal_overflow: return "internal_overflow";
    case Error::unauthorized: return "unauthorized";
    case Error::not_initiator: return "not_initiator";
    case Error::too_early: return "too_early";
    case Error::locked: return "locked";
    case Error::already_privileged: return "already_privileged";
    case Error::unlock_not_increased: return "unlock_not_increased";
    case Error::non_empty_destroy: return "non_empty_destroy";
    case Error::destroyed: return "destroyed";
    case Error::zero_address: return "zero_address";
    case Error::self_recipient: return "self_recipient";
    case Error::replay_divergence: return "replay_divergence";
    case Error::parse_error: return "parse_error";
    case Error::budget_exceeded: return "budget_exceeded";
    case Error::scenario_assertion_failed: return "scenario_assertion_failed";
    }
    return "unknown";
}

inline std::optional<Error> error_from_name(std::string_view s) {
    for (Error e : {
             Error::invalid_config, Error::ledger_full, Error::insufficient_funds,
             Error::overflow, Error::zero_amount, Error::not_found,
             Error::internal_overflow, Error::unauthorized, Error::not_initiator,
             Error::too_early, Error::locked, Error::already_privileged,
             Error::unlock_not_increased, Error::non_empty_destroy, Error::destroyed,
             Error::zero_address, Error::self_recipient, Error::replay_divergence,
             Error::parse_error, Error::budget_exceeded,
             Error::scenario_assertion_failed,
         }) {
        if (s == error_name(e))
            return e;
    }
    return std::nullopt;
}

// Minimal expected-style result. `detail` carries free-text context for parse
// and I/O failures (line numbers, offending tokens); rule rejections usually
// leave it empty because the code alone is the contract.
template <class T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {} // NOLINT: implicit by design
    Result(Error e, std::string detail = {}) : error_(e), detail_(std::move(detail)) {}

    bool ok() const { return !error_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return *value_; }
    T& value() & { return *value_; }
    T&& value() && { return *std::move(value_); }

    Error error() const { return *error_; }
    const std::string& detail() const { return detail_; }

private:
    std::optional<T> value_;
    std::optional<Error> error_;
    std::string detail_;
};

// Result for operations that produce no value.
class Status {
public:
    Status() = default;
    Status(Error e, std::string detail = {}) : error_(e), detail_(std::move(detail)) {}

    bool ok() const { return !error_.has_value(); }
    explicit operator bool() const { return ok(); }
    Error error() const { return *error_; }
    const std::string& detail() const { return detail_; }

private:
    std::optional<Error> error_;
    std::string detail_;
};

} // namespace phoenix
