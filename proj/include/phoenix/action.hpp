#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phoenix/address.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/ledger.hpp"

namespace phoenix {

// The eleven things an account can ask the vault to do. One action per
// block; the sender is carried separately.
namespace act {

struct Deposit {
    Amount amount;
    friend bool operator==(const Deposit&, const Deposit&) = default;
};
struct Request {
    Amount amount;
    Address recipient;
    friend bool operator==(const Request&, const Request&) = default;
};
struct Withdraw {
    RequestId id;
    friend bool operator==(const Withdraw&, const Withdraw&) = default;
};
struct CancelRequest {
    RequestId id;
    friend bool operator==(const CancelRequest&, const CancelRequest&) = default;
};
struct CancelAllRequests {
    friend bool operator==(const CancelAllRequests&, const CancelAllRequests&) = default;
};
struct CancelSelfRequest {
    RequestId id;
    friend bool operator==(const CancelSelfRequest&, const CancelSelfRequest&) = default;
};
struct Lock {
    BlockNumber new_unlock;
    friend bool operator==(const Lock&, const Lock&) = default;
};
struct AddT1 {
    Address address;
    friend bool operator==(const AddT1&, const AddT1&) = default;
};
struct AddT2 {
    Address address;
    friend bool operator==(const AddT2&, const AddT2&) = default;
};
struct RemoveT2 {
    Address address;
    friend bool operator==(const RemoveT2&, const RemoveT2&) = default;
};
struct Destroy {
    Address beneficiary;
    friend bool operator==(const Destroy&, const Destroy&) = default;
};

} // namespace act

using Action = std::variant<act::Deposit, act::Request, act::Withdraw, act::CancelRequest,
                            act::CancelAllRequests, act::CancelSelfRequest, act::Lock,
                            act::AddT1, act::AddT2, act::RemoveT2, act::Destroy>;

inline const char* action_name(const Action& a) {
    struct V {
        const char* operator()(const act::Deposit&) { return "deposit"; }
        const char* operator()(const act::Request&) { return "request"; }
        const char* operator()(const act::Withdraw&) { return "withdraw"; }
        const char* operator()(const act::CancelRequest&) { return "cancel_request"; }
        const char* operator()(const act::CancelAllRequests&) { return "cancel_all_requests"; }
        const char* operator()(const act::CancelSelfRequest&) { return "cancel_self_request"; }
        const char* operator()(const act::Lock&) { return "lock"; }
        const char* operator()(const act::AddT1&) { return "add_t1"; }
        const char* operator()(const act::AddT2&) { return "add_t2"; }
        const char* operator()(const act::RemoveT2&) { return "remove_t2"; }
        const char* operator()(const act::Destroy&) { return "destroy"; }
    };
    return std::visit(V{}, a);
}

// What an applied action did, in enough detail for scenario assertions and
// balance accounting. Rejections carry only the error code; by contract the
// state is untouched.
struct Effects {
    Amount funds_in;                                  // deposit amount
    Amount funds_out;                                 // withdrawal amount
    std::optional<std::pair<Address, Amount>> credit; // recipient of funds_out
    std::optional<RequestId> created_id;
    std::vector<RequestId> removed_ids;
    std::optional<Address> tier_change; // address added/removed by tier actions
    std::optional<BlockNumber> unlock_set;
    bool destroyed = false;
};

struct Outcome {
    // applied -> effects valid; rejected -> error valid
    bool applied = false;
    Error error = Error::invalid_config;
    Effects effects;

    static Outcome ok(Effects e = {}) { return Outcome{true, Error::invalid_config, std::move(e)}; }
    static Outcome reject(Error e) { return Outcome{false, e, {}}; }

    // Equality of the recorded part only (tag + error code); effects are
    // derived data and never serialized.
    bool same_verdict(const Outcome& o) const {
        return applied == o.applied && (applied || error == o.error);
    }
};

} // namespace phoenix
