#pragma once

#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "phoenix/action.hpp"
#include "phoenix/address.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/ledger.hpp"

namespace phoenix {

enum class Tier { t1, t2, unprivileged };

inline const char* tier_name(Tier t) {
    switch (t) {
    case Tier::t1: return "t1";
    case Tier::t2: return "t2";
    case Tier::unprivileged: return "unprivileged";
    }
    return "?";
}

// One-rule mutations of the transition function. Each deliberately breaks
// exactly one of the eighteen checked properties, so the checker can be
// validated against vaults that are known to be wrong. `none` is the real
// vault.
enum class Fault {
    none,
    withdraw_delay_off_by_one,     // 1.1: accepts block == creation + delay
    cancel_fails_when_locked,      // 1.2: tier-1 cancel rejected while locked
    lock_changes_delay,            // 1.3: lock also mutates the delay
    add_t1_replaces_set,           // 1.4: add_t1 drops previous tier-1 members
    destroy_ignores_funds,         // 1.5: destroy accepted with funds left
    add_t2_skips_membership_check, // 2.1: tier-1 member can gain tier-2 too
    add_t1_allows_t2_sender,       // 2.2: tier-2 may appoint tier-1
    request_allows_any_sender,     // 2.3: anyone may request
    cancel_self_ignores_initiator, // 2.4: tier-2 may cancel others' requests
    withdraw_ignores_unlock,       // 3.1: withdrawal possible while locked
    lock_allows_decrease,          // 3.2: unlock may move backwards
    lock_allows_any_sender,        // 3.3: anyone may lock
    remove_t2_allows_t2_sender,    // 3.4: tier-2 may remove tier-2
    add_t2_allows_t2_sender,       // 3.5: tier-2 may appoint tier-2
    insert_skips_overflow_check,   // 4.1: fixed-mode admission wraps silently
    request_allows_self_recipient, // 4.2: vault itself as recipient
    request_allows_zero_recipient, // 4.3: zero address as recipient
    remove_t2_keeps_requests,      // 4.4: demoted initiator's requests survive
};

inline const std::vector<std::pair<Fault, const char*>>& fault_names() {
    static const std::vector<std::pair<Fault, const char*>> table = {
        {Fault::none, "none"},
        {Fault::withdraw_delay_off_by_one, "withdraw_delay_off_by_one"},
        {Fault::cancel_fails_when_locked, "cancel_fails_when_locked"},
        {Fault::lock_changes_delay, "lock_changes_delay"},
        {Fault::add_t1_replaces_set, "add_t1_replaces_set"},
        {Fault::destroy_ignores_funds, "destroy_ignores_funds"},
        {Fault::add_t2_skips_membership_check, "add_t2_skips_membership_check"},
        {Fault::add_t1_allows_t2_sender, "add_t1_allows_t2_sender"},
        {Fault::request_allows_any_sender, "request_allows_any_sender"},
        {Fault::cancel_self_ignores_initiator, "cancel_self_ignores_initiator"},
        {Fault::withdraw_ignores_unlock, "withdraw_ignores_unlock"},
        {Fault::lock_allows_decrease, "lock_allows_decrease"},
        {Fault::lock_allows_any_sender, "lock_allows_any_sender"},
        {Fault::remove_t2_allows_t2_sender, "remove_t2_allows_t2_sender"},
        {Fault::add_t2_allows_t2_sender, "add_t2_allows_t2_sender"},
        {Fault::insert_skips_overflow_check, "insert_skips_overflow_check"},
        {Fault::request_allows_self_recipient, "request_allows_self_recipient"},
        {Fault::request_allows_zero_recipient, "request_allows_zero_recipient"},
        {Fault::remove_t2_keeps_requests, "remove_t2_keeps_requests"},
    };
    return table;
}

inline const char* fault_name(Fault f) {
    for (const auto& [fault, name] : fault_names())
        if (fault == f)
            return name;
    return "?";
}

inline std::optional<Fault> fault_from_name(std::string_view s) {
    for (const auto& [fault, name] : fault_names())
        if (s == name)
            return fault;
    return std::nullopt;
}

// Complete vault state. Plain value type: the transition function below is
// pure, and tests may forge arbitrary states to exercise the checkers.
struct VaultState {
    Amount funds;
    BlockNumber delay = 1;
    std::set<Address> t1;
    std::set<Address> t2;
    BlockNumber unlock = 0;
    Ledger ledger = Ledger::create(1, ArithmeticMode::fixed).value();
    Address self = vault_self_address();
    bool destroyed = false;
    Fault fault = Fault::none;

    Tier tier_of(const Address& a) const {
        if (t1.count(a))
            return Tier::t1;
        if (t2.count(a))
            return Tier::t2;
        return Tier::unprivileged;
    }
};

// Construction mirrors deployment: the deploying account becomes the sole
// tier-2 member and must name a distinct tier-1 address.
inline Result<VaultState> vault_new(BlockNumber delay, const Address& t1_addr,
                                    const Address& creator, std::size_t max_ledger_size,
                                    ArithmeticMode mode,
                                    const Address& self = vault_self_address(),
                                    Fault fault = Fault::none) {
    if (delay < 1)
        return {Error::invalid_config, "delay must be at least 1 block"};
    if (t1_addr.is_zero() || creator.is_zero())
        return {Error::invalid_config, "tier addresses must be nonzero"};
    if (t1_addr == creator)
        return {Error::invalid_config, "tier-1 address must differ from creator"};
    if (t1_addr == self || creator == self)
        return {Error::invalid_config, "tier addresses must differ from the vault"};
    auto ledger = Ledger::create(max_ledger_size, mode);
    if (!ledger)
        return {ledger.error(), ledger.detail()};
    VaultState v;
    v.delay = delay;
    v.t1 = {t1_addr};
    v.t2 = {creator};
    v.ledger = std::move(ledger.value());
    v.self = self;
    v.fault = fault;
    return v;
}

// Result of one transition. On rejection `next` is empty and the pre-state
// stands unchanged; on success `next` is the sole successor.
struct Transition {
    Outcome outcome;
    std::optional<VaultState> next;
};

namespace detail {

// The per-action rule bodies. Each takes the scratch copy `v` it may
// mutate; returning a rejection discards the copy.
struct ApplyVisitor {
    VaultState& v;
    BlockNumber block;
    const Address& sender;
    Tier tier;

    bool is_t1() const { return tier == Tier::t1; }
    bool is_t2() const { return tier == Tier::t2; }
    bool has(Fault f) const { return v.fault == f; }

    Outcome operator()(const act::Deposit& a) {
        auto summed = U256::add_checked(v.funds, a.amount);
        if (!summed) {
            // Balance overflow is unreachable with real coin supplies, but
            // the model must pick a semantics: legacy wraps, fixed rejects.
            if (v.ledger.mode() == ArithmeticMode::fixed)
                return Outcome::reject(Error::overflow);
            v.funds = U256::add_wrap(v.funds, a.amount);
        } else {
            v.funds = *summed;
        }
        Effects e;
        e.funds_in = a.amount;
        return Outcome::ok(std::move(e)); // zero amount: accepted no-op
    }

    Outcome operator()(const act::Request& a) {
        if (!is_t2() && !has(Fault::request_allows_any_sender))
            return Outcome::reject(Error::unauthorized);
        if (a.recipient.is_zero() && !has(Fault::request_allows_zero_recipient))
            return Outcome::reject(Error::zero_address);
        if (a.recipient == v.self && !has(Fault::request_allows_self_recipient))
            return Outcome::reject(Error::self_recipient);
        auto id = v.ledger.insert(a.amount, a.recipient, block, sender, v.funds,
                                  has(Fault::insert_skips_overflow_check));
        if (!id)
            return Outcome::reject(id.error());
        Effects e;
        e.created_id = id.value();
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::Withdraw& a) {
        const Request* req = v.ledger.get(a.id);
        if (!req)
            return Outcome::reject(Error::not_found);
        bool delay_ok = has(Fault::withdraw_delay_off_by_one)
                            ? block >= req->creation + v.delay
                            : block > req->creation + v.delay;
        if (!delay_ok)
            return Outcome::reject(Error::too_early);
        if (block <= v.unlock && !has(Fault::withdraw_ignores_unlock))
            return Outcome::reject(Error::locked);
        // The transfer itself fails if the balance cannot cover it. With
        // checked admission this is unreachable; with wrapping admission a
        // stale over-sized request can trip it.
        if (req->amount > v.funds)
            return Outcome::reject(Error::insufficient_funds);
        Request removed = v.ledger.remove(a.id).value();
        v.funds = U256::sub_wrap(v.funds, removed.amount);
        Effects e;
        e.funds_out = removed.amount;
        e.credit = {removed.recipient, removed.amount};
        e.removed_ids = {removed.id};
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::CancelRequest& a) {
        if (!is_t1())
            return Outcome::reject(Error::unauthorized);
        if (has(Fault::cancel_fails_when_locked) && block <= v.unlock)
            return Outcome::reject(Error::locked);
        auto removed = v.ledger.remove(a.id);
        if (!removed)
            return Outcome::reject(removed.error());
        Effects e;
        e.removed_ids = {removed.value().id};
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::CancelAllRequests&) {
        if (!is_t1())
            return Outcome::reject(Error::unauthorized);
        Effects e;
        for (const Request& r : v.ledger.iterate())
            e.removed_ids.push_back(r.id);
        v.ledger.cancel_all();
        return Outcome::ok(std::move(e)); // empty book: accepted no-op
    }

    Outcome operator()(const act::CancelSelfRequest& a) {
        if (!is_t2())
            return Outcome::reject(Error::unauthorized);
        const Request* req = v.ledger.get(a.id);
        if (!req)
            return Outcome::reject(Error::not_found);
        if (req->initiator != sender && !has(Fault::cancel_self_ignores_initiator))
            return Outcome::reject(Error::not_initiator);
        Effects e;
        e.removed_ids = {v.ledger.remove(a.id).value().id};
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::Lock& a) {
        if (!is_t1() && !has(Fault::lock_allows_any_sender))
            return Outcome::reject(Error::unauthorized);
        if (a.new_unlock <= v.unlock && !has(Fault::lock_allows_decrease))
            return Outcome::reject(Error::unlock_not_increased);
        v.unlock = a.new_unlock;
        if (has(Fault::lock_changes_delay))
            v.delay += 1;
        Effects e;
        e.unlock_set = a.new_unlock;
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::AddT1& a) {
        if (!is_t1() && !(has(Fault::add_t1_allows_t2_sender) && is_t2()))
            return Outcome::reject(Error::unauthorized);
        if (a.address.is_zero())
            return Outcome::reject(Error::zero_address);
        if (v.t1.count(a.address) || v.t2.count(a.address))
            return Outcome::reject(Error::already_privileged);
        if (has(Fault::add_t1_replaces_set))
            v.t1.clear();
        v.t1.insert(a.address);
        Effects e;
        e.tier_change = a.address;
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::AddT2& a) {
        if (!is_t1() && !(has(Fault::add_t2_allows_t2_sender) && is_t2()))
            return Outcome::reject(Error::unauthorized);
        if (a.address.is_zero())
            return Outcome::reject(Error::zero_address);
        bool member = has(Fault::add_t2_skips_membership_check)
                          ? v.t2.count(a.address) != 0
                          : v.t1.count(a.address) || v.t2.count(a.address);
        if (member)
            return Outcome::reject(Error::already_privileged);
        v.t2.insert(a.address);
        Effects e;
        e.tier_change = a.address;
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::RemoveT2& a) {
        if (!is_t1() && !(has(Fault::remove_t2_allows_t2_sender) && is_t2()))
            return Outcome::reject(Error::unauthorized);
        if (!v.t2.count(a.address))
            return Outcome::reject(Error::not_found);
        v.t2.erase(a.address);
        Effects e;
        if (!has(Fault::remove_t2_keeps_requests))
            e.removed_ids = v.ledger.remove_by_initiator(a.address);
        e.tier_change = a.address;
        return Outcome::ok(std::move(e));
    }

    Outcome operator()(const act::Destroy& a) {
        if (!is_t1())
            return Outcome::reject(Error::unauthorized);
        if (!v.funds.is_zero() && !has(Fault::destroy_ignores_funds))
            return Outcome::reject(Error::non_empty_destroy);
        v.destroyed = true;
        Effects e;
        e.destroyed = true;
        e.credit = {a.beneficiary, v.funds}; // zero unless the rule is broken
        v.funds = Amount{};
        return Outcome::ok(std::move(e));
    }
};

} // namespace detail

// Pure transition. `block` must be the current block number and must never
// decrease across calls (the chain layer enforces that ordering). Rejected
// actions leave the state untouched.
inline Transition vault_apply(const VaultState& state, BlockNumber block,
                              const Address& sender, const Action& action) {
    if (state.destroyed)
        return {Outcome::reject(Error::destroyed), std::nullopt};
    VaultState scratch = state;
    detail::ApplyVisitor vis{scratch, block, sender, state.tier_of(sender)};
    Outcome out = std::visit(vis, action);
    if (!out.applied)
        return {std::move(out), std::nullopt};
    return {std::move(out), std::move(scratch)};
}

} // namespace phoenix
