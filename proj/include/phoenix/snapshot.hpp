#pragma once

#include <string>

#include "phoenix/chain.hpp"
#include "phoenix/trace.hpp"

namespace phoenix {

// Persistent form of a whole chain: vault, block position, external
// balances, and the trace so far. Same textual conventions as trace records
// (decimal-string amounts, 0x-hex addresses, sorted keys), so one family of
// tools reads both. Serialization is canonical: identical states produce
// identical bytes, which is what replay round-trip tests compare.

inline json vault_to_json(const VaultState& v) {
    json t1 = json::array();
    for (const Address& a : v.t1) // std::set: already sorted
        t1.push_back(a.to_string());
    json t2 = json::array();
    for (const Address& a : v.t2)
        t2.push_back(a.to_string());
    json requests = json::array();
    for (const Request& r : v.ledger.iterate()) {
        requests.push_back({{"id", r.id.to_decimal()},
                            {"amount", r.amount.to_decimal()},
                            {"recipient", r.recipient.to_string()},
                            {"creation", std::to_string(r.creation)},
                            {"initiator", r.initiator.to_string()}});
    }
    return {{"funds", v.funds.to_decimal()},
            {"delay", std::to_string(v.delay)},
            {"t1", std::move(t1)},
            {"t2", std::move(t2)},
            {"unlock", std::to_string(v.unlock)},
            {"mode", mode_name(v.ledger.mode())},
            {"max_requests", std::to_string(v.ledger.max_size())},
            {"next_id", v.ledger.next_id().to_decimal()},
            {"lastid", v.ledger.lastid().to_decimal()},
            {"requests", std::move(requests)},
            {"self", v.self.to_string()},
            {"destroyed", v.destroyed}};
}

inline Result<VaultState> vault_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object())
        return {Error::parse_error, "vault is not an object"};

    auto funds = json_u256_field(j, "funds");
    if (!funds)
        return {funds.error(), funds.detail()};
    auto delay = json_block_field(j, "delay");
    if (!delay)
        return {delay.error(), delay.detail()};
    auto unlock = json_block_field(j, "unlock");
    if (!unlock)
        return {unlock.error(), unlock.detail()};
    auto self = json_address_field(j, "self");
    if (!self)
        return {self.error(), self.detail()};
    auto next_id = json_u256_field(j, "next_id");
    if (!next_id)
        return {next_id.error(), next_id.detail()};
    auto lastid = json_u256_field(j, "lastid");
    if (!lastid)
        return {lastid.error(), lastid.detail()};
    auto max_requests = json_block_field(j, "max_requests");
    if (!max_requests)
        return {max_requests.error(), max_requests.detail()};

    auto mode_str = json_string_field(j, "mode");
    if (!mode_str)
        return {mode_str.error(), mode_str.detail()};
    auto mode = mode_from_name(mode_str.value());
    if (!mode)
        return {Error::parse_error, "unknown mode '" + mode_str.value() + "'"};

    auto destroyed_it = j.find("destroyed");
    if (destroyed_it == j.end() || !destroyed_it->is_boolean())
        return {Error::parse_error, "missing boolean field 'destroyed'"};

    auto read_tier = [&](const char* key, std::set<Address>& out) -> Status {
        auto it = j.find(key);
        if (it == j.end() || !it->is_array())
            return {Error::parse_error, std::string("missing array field '") + key + "'"};
        for (const json& e : *it) {
            if (!e.is_string())
                return {Error::parse_error, std::string("non-string entry in '") + key + "'"};
            auto a = Address::parse(e.get<std::string>());
            if (!a)
                return {Error::parse_error, "bad address in '" + std::string(key) + "'"};
            out.insert(*a);
        }
        return {};
    };

    VaultState v;
    if (auto st = read_tier("t1", v.t1); !st.ok())
        return {st.error(), st.detail()};
    if (auto st = read_tier("t2", v.t2); !st.ok())
        return {st.error(), st.detail()};
    if (v.t1.empty())
        return {Error::parse_error, "t1 must not be empty"};
    if (delay.value() < 1)
        return {Error::parse_error, "delay must be at least 1"};

    auto req_it = j.find("requests");
    if (req_it == j.end() || !req_it->is_array())
        return {Error::parse_error, "missing array field 'requests'"};
    std::vector<Request> requests;
    for (const json& e : *req_it) {
        Request r;
        auto id = json_u256_field(e, "id");
        if (!id)
            return {id.error(), id.detail()};
        auto amount = json_u256_field(e, "amount");
        if (!amount)
            return {amount.error(), amount.detail()};
        auto recipient = json_address_field(e, "recipient");
        if (!recipient)
            return {recipient.error(), recipient.detail()};
        auto creation = json_block_field(e, "creation");
        if (!creation)
            return {creation.error(), creation.detail()};
        auto initiator = json_address_field(e, "initiator");
        if (!initiator)
            return {initiator.error(), initiator.detail()};
        requests.push_back(Request{id.value(), amount.value(), recipient.value(),
                                   creation.value(), initiator.value()});
    }
    auto ledger = Ledger::restore(max_requests.value(), *mode, requests, next_id.value(),
                                  lastid.value());
    if (!ledger)
        return {ledger.error(), ledger.detail()};

    v.funds = funds.value();
    v.delay = delay.value();
    v.unlock = unlock.value();
    v.ledger = std::move(ledger.value());
    v.self = self.value();
    v.destroyed = destroyed_it->get<bool>();
    return v;
}

inline json chain_to_json(const Chain& c) {
    json balances = json::object();
    for (const auto& [addr, amount] : c.balances())
        balances[addr.to_string()] = amount.to_decimal();
    json trace = json::array();
    for (const Record& r : c.trace())
        trace.push_back(record_to_json(r));
    return {{"block", std::to_string(c.current_block())},
            {"balances", std::move(balances)},
            {"trace", std::move(trace)},
            {"vault", vault_to_json(c.vault())}};
}

inline std::string snapshot_to_string(const Chain& c) {
    return chain_to_json(c).dump() + "\n";
}

inline Result<Chain> chain_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object())
        return {Error::parse_error, "snapshot is not an object"};
    auto block = json_block_field(j, "block");
    if (!block)
        return {block.error(), block.detail()};
    auto vault_it = j.find("vault");
    if (vault_it == j.end())
        return {Error::parse_error, "missing vault"};
    auto vault = vault_from_json(*vault_it);
    if (!vault)
        return {vault.error(), vault.detail()};

    std::map<Address, Amount> balances;
    if (auto it = j.find("balances"); it != j.end()) {
        if (!it->is_object())
            return {Error::parse_error, "balances is not an object"};
        for (auto& [key, val] : it->items()) {
            auto addr = Address::parse(key);
            if (!addr)
                return {Error::parse_error, "bad balance address " + key};
            if (!val.is_string())
                return {Error::parse_error, "balance amounts must be decimal strings"};
            auto amount = U256::from_decimal(val.get<std::string>());
            if (!amount)
                return {Error::parse_error, "bad balance amount for " + key};
            balances[*addr] = *amount;
        }
    }

    std::vector<Record> trace;
    if (auto it = j.find("trace"); it != j.end()) {
        if (!it->is_array())
            return {Error::parse_error, "trace is not an array"};
        for (const json& e : *it) {
            auto rec = record_from_json(e);
            if (!rec)
                return {rec.error(), rec.detail()};
            if (!trace.empty() && rec.value().block <= trace.back().block)
                return {Error::parse_error, "trace block numbers must increase"};
            trace.push_back(std::move(rec.value()));
        }
    }
    if (!trace.empty() && trace.back().block > block.value())
        return {Error::parse_error, "trace extends past the snapshot block"};

    // Live requests must not postdate the snapshot position.
    for (const Request& r : vault.value().ledger.iterate()) {
        if (r.creation > block.value())
            return {Error::parse_error,
                    "request " + r.id.to_decimal() + " created after snapshot block"};
    }

    Chain c;
    c.vault_mut() = std::move(vault.value());
    c.restore_position(block.value(), std::move(balances), std::move(trace));
    return c;
}

inline Result<Chain> chain_from_string(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        return {Error::parse_error, "snapshot is not valid JSON"};
    return chain_from_json(j);
}

} // namespace phoenix
