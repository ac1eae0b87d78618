#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "phoenix/chain.hpp"
#include "phoenix/trace.hpp"
#include "phoenix/vault.hpp"

namespace phoenix {

// The eighteen checked safety properties, grouped in four layers:
//   1.x  base vault behaviour
//   2.x  separation between the two key tiers
//   3.x  recovery leverage of tier one
//   4.x  consequences of tier-one minimization
struct PropertyId {
    std::uint8_t major = 0;
    std::uint8_t minor = 0;

    friend bool operator==(const PropertyId&, const PropertyId&) = default;
    friend auto operator<=>(const PropertyId&, const PropertyId&) = default;

    std::string to_string() const {
        return std::to_string(major) + "." + std::to_string(minor);
    }
};

struct PropertyInfo {
    PropertyId id;
    const char* label;
};

inline const std::vector<PropertyInfo>& all_properties() {
    static const std::vector<PropertyInfo> table = {
        {{1, 1}, "withdrawal only after the per-request delay"},
        {{1, 2}, "tier-1 cancellation of a pending request cannot fail"},
        {{1, 3}, "the delay never changes"},
        {{1, 4}, "the tier-1 set never shrinks"},
        {{1, 5}, "destruction only with zero funds"},
        {{2, 1}, "no address holds both tiers"},
        {{2, 2}, "only tier-1 appoints tier-1"},
        {{2, 3}, "only tier-2 requests withdrawals"},
        {{2, 4}, "tier-2 cancels only its own requests"},
        {{3, 1}, "funds cannot leave while locked"},
        {{3, 2}, "the unlock point only moves forward"},
        {{3, 3}, "only tier-1 locks"},
        {{3, 4}, "only tier-1 removes tier-2"},
        {{3, 5}, "only tier-1 appoints tier-2"},
        {{4, 1}, "pending request amounts stay covered by funds"},
        {{4, 2}, "the vault never pays itself"},
        {{4, 3}, "the zero address is never a recipient"},
        {{4, 4}, "every pending request belongs to a current tier-2"},
    };
    return table;
}

struct Violation {
    PropertyId prop;
    std::vector<Record> witness; // actions from the initial state, in order
    std::string note;

    friend bool operator==(const Violation&, const Violation&) = default;
};

// State-level invariants (2.1 and the 4.x layer). A destroyed vault is
// terminal and out of scope. The 4.1 sum is the ledger's own running sum,
// i.e. what the contract believes is earmarked; in legacy mode that value
// wraps, which is precisely how the published attack slips past it.
inline std::vector<PropertyId> check_state(const VaultState& v) {
    std::vector<PropertyId> out;
    if (v.destroyed)
        return out;
    for (const Address& a : v.t1) {
        if (v.t2.count(a)) {
            out.push_back({2, 1});
            break;
        }
    }
    if (v.ledger.amount_sum() > v.funds)
        out.push_back({4, 1});
    bool self_hit = false, zero_hit = false, foreign_hit = false;
    for (const Request& r : v.ledger.iterate()) {
        self_hit |= r.recipient == v.self;
        zero_hit |= r.recipient.is_zero();
        foreign_hit |= v.t2.count(r.initiator) == 0;
    }
    if (self_hit)
        out.push_back({4, 2});
    if (zero_hit)
        out.push_back({4, 3});
    if (foreign_hit)
        out.push_back({4, 4});
    return out;
}

// Transition-level rules. `pre` is the state the action was applied to,
// `post` the state after it (pass `pre` again for rejections). Covers the
// authorization properties, the delay/destroy preconditions, the tier-1
// cancellation obligation, and the four single-step monotonicity checks
// (delay constant, tier-1 growth, unlock growth, no outflow while locked).
inline std::vector<PropertyId> check_transition(const VaultState& pre, const Record& rec,
                                                const VaultState& post) {
    std::vector<PropertyId> out;
    if (pre.destroyed || !rec.outcome)
        return out;
    const Outcome& oc = *rec.outcome;
    bool t1_sender = pre.t1.count(rec.sender) != 0;
    bool t2_sender = pre.t2.count(rec.sender) != 0;

    if (oc.applied) {
        if (const auto* w = std::get_if<act::Withdraw>(&rec.action)) {
            if (const Request* r = pre.ledger.get(w->id)) {
                if (!(rec.block > r->creation + pre.delay))
                    out.push_back({1, 1});
            }
        }
        if (std::holds_alternative<act::Destroy>(rec.action) && !pre.funds.is_zero())
            out.push_back({1, 5});
        if (std::holds_alternative<act::AddT1>(rec.action) && !t1_sender)
            out.push_back({2, 2});
        if (std::holds_alternative<act::Request>(rec.action) && !t2_sender)
            out.push_back({2, 3});
        if (const auto* c = std::get_if<act::CancelSelfRequest>(&rec.action)) {
            if (const Request* r = pre.ledger.get(c->id)) {
                if (r->initiator != rec.sender)
                    out.push_back({2, 4});
            }
        }
        if (std::holds_alternative<act::Lock>(rec.action) && !t1_sender)
            out.push_back({3, 3});
        if (std::holds_alternative<act::RemoveT2>(rec.action) && !t1_sender)
            out.push_back({3, 4});
        if (std::holds_alternative<act::AddT2>(rec.action) && !t1_sender)
            out.push_back({3, 5});
    } else {
        // The one obligation: a tier-1 cancel of a live request must land.
        if (const auto* c = std::get_if<act::CancelRequest>(&rec.action)) {
            if (t1_sender && pre.ledger.get(c->id) != nullptr)
                out.push_back({1, 2});
        }
    }

    if (post.delay != pre.delay)
        out.push_back({1, 3});
    if (!std::includes(post.t1.begin(), post.t1.end(), pre.t1.begin(), pre.t1.end()))
        out.push_back({1, 4});
    if (rec.block <= pre.unlock && post.funds < pre.funds)
        out.push_back({3, 1});
    if (post.unlock < pre.unlock)
        out.push_back({3, 2});
    return out;
}

struct TraceCheck {
    std::vector<Violation> violations; // first occurrence per property
    std::size_t steps = 0;
    VaultState final_state;
};

// Property-checks a recorded trace from a given starting chain state.
//
// Records that carry an outcome are trusted as claims about what happened:
// an applied record has its nominal effect mirrored into the tracked state
// even where the real rules would have refused, so traces from other
// implementations (or hand-edited ones) are judged on what they assert.
// Records with no outcome are executed under the real transition rules.
// Claims that are structurally impossible (withdrawing a request that does
// not exist, spending more than the balance, acting on a destroyed vault)
// fail with replay_divergence.
inline Result<TraceCheck> check_trace(const Chain& initial,
                                      const std::vector<Record>& records) {
    TraceCheck result;
    VaultState state = initial.vault();
    BlockNumber block = initial.current_block();

    auto flagged = [&](PropertyId p) {
        return std::any_of(result.violations.begin(), result.violations.end(),
                           [&](const Violation& v) { return v.prop == p; });
    };

    auto record_hits = [&](const std::vector<PropertyId>& hits, std::size_t upto) {
        for (PropertyId p : hits) {
            if (!flagged(p))
                result.violations.push_back(Violation{
                    p,
                    {records.begin(), records.begin() + static_cast<std::ptrdiff_t>(upto)},
                    {}});
        }
    };

    record_hits(check_state(state), 0);

    for (std::size_t i = 0; i < records.size(); ++i) {
        Record rec = records[i];
        if (rec.block <= block)
            return {Error::parse_error, "record " + std::to_string(i + 1) +
                                            ": block numbers must increase"};
        block = rec.block;
        VaultState pre = state;

        if (!rec.outcome) {
            Transition tr = vault_apply(state, block, rec.sender, rec.action);
            rec.outcome = tr.outcome;
            if (tr.next)
                state = std::move(*tr.next);
        } else if (rec.outcome->applied) {
            auto fail = [&](const std::string& what) -> Result<TraceCheck> {
                return {Error::replay_divergence,
                        "record " + std::to_string(i + 1) + ": claimed applied " + what};
            };
            if (state.destroyed)
                return fail("action on a destroyed vault");
            struct Mirror {
                VaultState& v;
                BlockNumber block;
                const Address& sender;
                std::optional<std::string> problem;

                void operator()(const act::Deposit& a) {
                    v.funds = U256::add_wrap(v.funds, a.amount);
                }
                void operator()(const act::Request& a) {
                    v.ledger.force_insert(a.amount, a.recipient, block, sender);
                }
                void operator()(const act::Withdraw& a) {
                    const Request* r = v.ledger.get(a.id);
                    if (!r) {
                        problem = "withdraw of missing request " + a.id.to_decimal();
                        return;
                    }
                    if (r->amount > v.funds) {
                        problem = "withdraw beyond the vault balance";
                        return;
                    }
                    Request gone = v.ledger.remove(a.id).value();
                    v.funds = U256::sub_wrap(v.funds, gone.amount);
                }
                void operator()(const act::CancelRequest& a) {
                    if (!v.ledger.remove(a.id))
                        problem = "cancel of missing request " + a.id.to_decimal();
                }
                void operator()(const act::CancelAllRequests&) { v.ledger.cancel_all(); }
                void operator()(const act::CancelSelfRequest& a) {
                    if (!v.ledger.remove(a.id))
                        problem = "cancel of missing request " + a.id.to_decimal();
                }
                void operator()(const act::Lock& a) { v.unlock = a.new_unlock; }
                void operator()(const act::AddT1& a) { v.t1.insert(a.address); }
                void operator()(const act::AddT2& a) { v.t2.insert(a.address); }
                void operator()(const act::RemoveT2& a) {
                    v.t2.erase(a.address);
                    v.ledger.remove_by_initiator(a.address);
                }
                void operator()(const act::Destroy&) {
                    v.destroyed = true;
                    v.funds = Amount{};
                }
            };
            Mirror m{state, block, rec.sender, std::nullopt};
            std::visit(m, rec.action);
            if (m.problem)
                return fail(*m.problem);
        }
        // claimed-rejected records leave the state untouched

        record_hits(check_transition(pre, rec, state), i + 1);
        record_hits(check_state(state), i + 1);
        ++result.steps;
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace phoenix
