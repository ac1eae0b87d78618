#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phoenix/action.hpp"
#include "phoenix/address.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/ledger.hpp"

namespace phoenix {

// One submitted action. Traces are serialized one record per line as a JSON
// object with keys block / sender / action / outcome. Amounts, ids and block
// numbers travel as decimal strings so 256-bit values survive any JSON
// reader; addresses are 0x-hex. Idle stretches are not recorded: a jump in
// block numbers between consecutive records is the gap.
struct Record {
    BlockNumber block = 0;
    Address sender;
    Action action = act::Deposit{};
    // Present when the producer recorded what happened. Replay compares the
    // verdict (applied / rejected+code); hand-assembled inputs may omit it.
    std::optional<Outcome> outcome;
};

using json = nlohmann::json;

inline json action_to_json(const Action& a) {
    struct V {
        json operator()(const act::Deposit& x) {
            return {{"type", "deposit"}, {"amount", x.amount.to_decimal()}};
        }
        json operator()(const act::Request& x) {
            return {{"type", "request"},
                    {"amount", x.amount.to_decimal()},
                    {"recipient", x.recipient.to_string()}};
        }
        json operator()(const act::Withdraw& x) {
            return {{"type", "withdraw"}, {"id", x.id.to_decimal()}};
        }
        json operator()(const act::CancelRequest& x) {
            return {{"type", "cancel_request"}, {"id", x.id.to_decimal()}};
        }
        json operator()(const act::CancelAllRequests&) {
            return {{"type", "cancel_all_requests"}};
        }
        json operator()(const act::CancelSelfRequest& x) {
            return {{"type", "cancel_self_request"}, {"id", x.id.to_decimal()}};
        }
        json operator()(const act::Lock& x) {
            return {{"type", "lock"}, {"unlock", std::to_string(x.new_unlock)}};
        }
        json operator()(const act::AddT1& x) {
            return {{"type", "add_t1"}, {"address", x.address.to_string()}};
        }
        json operator()(const act::AddT2& x) {
            return {{"type", "add_t2"}, {"address", x.address.to_string()}};
        }
        json operator()(const act::RemoveT2& x) {
            return {{"type", "remove_t2"}, {"address", x.address.to_string()}};
        }
        json operator()(const act::Destroy& x) {
            return {{"type", "destroy"}, {"beneficiary", x.beneficiary.to_string()}};
        }
    };
    return std::visit(V{}, a);
}

namespace detail {

inline Result<std::string> json_string_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        return {Error::parse_error, std::string("missing string field '") + key + "'"};
    return it->get<std::string>();
}

inline Result<U256> json_u256_field(const json& j, const char* key) {
    auto s = json_string_field(j, key);
    if (!s)
        return {s.error(), s.detail()};
    auto v = U256::from_decimal(s.value());
    if (!v)
        return {Error::parse_error, std::string("bad decimal in '") + key + "': " + s.value()};
    return *v;
}

inline Result<Address> json_address_field(const json& j, const char* key) {
    auto s = json_string_field(j, key);
    if (!s)
        return {s.error(), s.detail()};
    auto a = Address::parse(s.value());
    if (!a)
        return {Error::parse_error, std::string("bad address in '") + key + "': " + s.value()};
    return *a;
}

inline Result<BlockNumber> json_block_field(const json& j, const char* key) {
    auto s = json_string_field(j, key);
    if (!s)
        return {s.error(), s.detail()};
    BlockNumber b = 0;
    const std::string& str = s.value();
    auto [p, ec] = std::from_chars(str.data(), str.data() + str.size(), b);
    if (ec != std::errc{} || p != str.data() + str.size())
        return {Error::parse_error, std::string("bad block number in '") + key + "': " + str};
    return b;
}

} // namespace detail

inline Result<Action> action_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object())
        return {Error::parse_error, "action is not an object"};
    auto type = json_string_field(j, "type");
    if (!type)
        return {type.error(), type.detail()};
    const std::string& t = type.value();

    if (t == "deposit") {
        auto amount = json_u256_field(j, "amount");
        if (!amount)
            return {amount.error(), amount.detail()};
        return Action{act::Deposit{amount.value()}};
    }
    if (t == "request") {
        auto amount = json_u256_field(j, "amount");
        if (!amount)
            return {amount.error(), amount.detail()};
        auto recipient = json_address_field(j, "recipient");
        if (!recipient)
            return {recipient.error(), recipient.detail()};
        return Action{act::Request{amount.value(), recipient.value()}};
    }
    if (t == "withdraw" || t == "cancel_request" || t == "cancel_self_request") {
        auto id = json_u256_field(j, "id");
        if (!id)
            return {id.error(), id.detail()};
        if (t == "withdraw")
            return Action{act::Withdraw{id.value()}};
        if (t == "cancel_request")
            return Action{act::CancelRequest{id.value()}};
        return Action{act::CancelSelfRequest{id.value()}};
    }
    if (t == "cancel_all_requests")
        return Action{act::CancelAllRequests{}};
    if (t == "lock") {
        auto unlock = json_block_field(j, "unlock");
        if (!unlock)
            return {unlock.error(), unlock.detail()};
        return Action{act::Lock{unlock.value()}};
    }
    if (t == "add_t1" || t == "add_t2" || t == "remove_t2") {
        auto address = json_address_field(j, "address");
        if (!address)
            return {address.error(), address.detail()};
        if (t == "add_t1")
            return Action{act::AddT1{address.value()}};
        if (t == "add_t2")
            return Action{act::AddT2{address.value()}};
        return Action{act::RemoveT2{address.value()}};
    }
    if (t == "destroy") {
        auto beneficiary = json_address_field(j, "beneficiary");
        if (!beneficiary)
            return {beneficiary.error(), beneficiary.detail()};
        return Action{act::Destroy{beneficiary.value()}};
    }
    return {Error::parse_error, "unknown action type '" + t + "'"};
}

inline json outcome_to_json(const Outcome& o) {
    if (o.applied)
        return {{"status", "applied"}};
    return {{"status", "rejected"}, {"error", error_name(o.error)}};
}

inline Result<Outcome> outcome_from_json(const json& j) {
    using namespace detail;
    auto status = json_string_field(j, "status");
    if (!status)
        return {status.error(), status.detail()};
    if (status.value() == "applied")
        return Outcome::ok();
    if (status.value() != "rejected")
        return {Error::parse_error, "unknown outcome status '" + status.value() + "'"};
    auto name = json_string_field(j, "error");
    if (!name)
        return {name.error(), name.detail()};
    auto err = error_from_name(name.value());
    if (!err)
        return {Error::parse_error, "unknown error code '" + name.value() + "'"};
    return Outcome::reject(*err);
}

inline json record_to_json(const Record& r) {
    json j{{"block", std::to_string(r.block)},
           {"sender", r.sender.to_string()},
           {"action", action_to_json(r.action)}};
    if (r.outcome)
        j["outcome"] = outcome_to_json(*r.outcome);
    return j;
}

inline Result<Record> record_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object())
        return {Error::parse_error, "record is not an object"};
    Record r;
    auto block = json_block_field(j, "block");
    if (!block)
        return {block.error(), block.detail()};
    r.block = block.value();
    auto sender = json_address_field(j, "sender");
    if (!sender)
        return {sender.error(), sender.detail()};
    r.sender = sender.value();
    auto it = j.find("action");
    if (it == j.end())
        return {Error::parse_error, "missing action"};
    auto action = action_from_json(*it);
    if (!action)
        return {action.error(), action.detail()};
    r.action = action.value();
    if (auto o = j.find("outcome"); o != j.end()) {
        auto outcome = outcome_from_json(*o);
        if (!outcome)
            return {outcome.error(), outcome.detail()};
        r.outcome = outcome.value();
    }
    return r;
}

inline void write_trace(std::ostream& os, const std::vector<Record>& records) {
    for (const Record& r : records)
        os << record_to_json(r).dump() << '\n';
}

inline std::string trace_to_string(const std::vector<Record>& records) {
    std::string out;
    for (const Record& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline Result<std::vector<Record>> parse_trace(std::istream& is) {
    std::vector<Record> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded())
            return {Error::parse_error, "line " + std::to_string(lineno) + ": not valid JSON"};
        auto rec = record_from_json(j);
        if (!rec)
            return {Error::parse_error,
                    "line " + std::to_string(lineno) + ": " + rec.detail()};
        if (!out.empty() && rec.value().block <= out.back().block)
            return {Error::parse_error,
                    "line " + std::to_string(lineno) + ": block numbers must increase"};
        out.push_back(std::move(rec.value()));
    }
    return out;
}

} // namespace phoenix
