#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "phoenix/properties.hpp"
#include "phoenix/vault.hpp"

namespace phoenix {

// Bounded-exhaustive search over everything every account could do to one
// vault, up to a fixed number of actions. Small by design: the interesting
// behaviours (both published attacks and every rule violation of the broken
// variants) already show up within a handful of actions over a handful of
// addresses and amounts.
struct ExploreConfig {
    std::size_t addresses = 4;      // tier-1 holder, creator, extras..., zero probe
    std::uint64_t amount_cap = 3;   // small amounts run 0..cap
    std::size_t max_depth = 6;      // actions per sequence
    BlockNumber delay = 2;
    std::size_t max_ledger_size = 4;
    ArithmeticMode mode = ArithmeticMode::fixed;
    Amount initial_funds{3};        // pre-seeded balance of the root state
    std::size_t max_states = 1'000'000;
    Fault fault = Fault::none;
};

struct ExploreReport {
    std::size_t states = 0;      // distinct canonical states discovered
    std::size_t transitions = 0; // edges evaluated (applied and rejected)
    bool budget_exceeded = false;
    std::vector<Violation> violations; // at most one per property, minimal witness
    VaultState root;                   // exploration start state (block 0)
};

// The fixed address universe: deterministic, human-readable, disjoint from
// the vault's own address. Index 0 holds tier 1, index 1 is the creator
// (tier 2), the rest are unprivileged, and the zero address closes the list
// as a probe sender/argument.
inline std::vector<Address> explore_universe(std::size_t n) {
    std::vector<Address> u;
    for (std::size_t i = 0; i + 1 < n; ++i)
        u.push_back(Address::from_index(0xa + i));
    u.push_back(Address::zero());
    return u;
}

namespace detail {

// Time-normalized fingerprint. Absolute block numbers never appear: request
// ages are capped at the delay (older behaves identically forever) and the
// unlock point is kept as a remaining-blocks value capped at the horizon the
// search can still reach. Two states with equal digests are
// indistinguishable by any remaining action sequence.
inline std::string canonical_digest(const VaultState& v, BlockNumber block,
                                    BlockNumber horizon) {
    std::string d;
    d.reserve(160);
    d += "F=";
    d += v.funds.to_decimal();
    d += ";D=";
    d += std::to_string(v.delay);
    d += ";U=";
    BlockNumber rem = v.unlock > block ? v.unlock - block : 0;
    if (rem > horizon)
        rem = horizon;
    d += std::to_string(rem);
    d += ";X=";
    d += v.destroyed ? '1' : '0';
    d += ";T1=";
    for (const Address& a : v.t1) {
        d += a.to_string();
        d += ',';
    }
    d += ";T2=";
    for (const Address& a : v.t2) {
        d += a.to_string();
        d += ',';
    }
    d += ";S=";
    d += v.ledger.amount_sum().to_decimal();
    d += ";N=";
    d += v.ledger.next_id().to_decimal();
    d += ";W=";
    d += v.ledger.lastid().to_decimal();
    d += ";L=";
    for (const Request& r : v.ledger.iterate()) {
        BlockNumber age = block - r.creation;
        if (age > v.delay)
            age = v.delay;
        d += '(';
        d += r.id.to_decimal();
        d += ',';
        d += r.amount.to_decimal();
        d += ',';
        d += r.recipient.to_string();
        d += ',';
        d += r.initiator.to_string();
        d += ',';
        d += std::to_string(age);
        d += ')';
    }
    return d;
}

} // namespace detail

inline Result<ExploreReport> explore(const ExploreConfig& cfg) {
    if (cfg.addresses < 4)
        return {Error::invalid_config,
                "need at least 4 addresses: t1, creator, one unprivileged, zero"};
    if (cfg.delay < 1)
        return {Error::invalid_config, "delay must be at least 1"};
    if (cfg.amount_cap < 1)
        return {Error::invalid_config, "amount cap must be at least 1"};
    if (cfg.max_states < 1)
        return {Error::invalid_config, "state budget must be positive"};

    std::vector<Address> universe = explore_universe(cfg.addresses);
    const Address& t1_addr = universe[0];
    const Address& creator = universe[1];

    auto root = vault_new(cfg.delay, t1_addr, creator, cfg.max_ledger_size, cfg.mode,
                          vault_self_address(), cfg.fault);
    if (!root)
        return {root.error(), root.detail()};
    root.value().funds = cfg.initial_funds;

    // Small amounts for deposits; requests additionally probe the top of the
    // 256-bit range, where the wrapping-admission bug lives.
    std::vector<Amount> small_amounts;
    for (std::uint64_t a = 0; a <= cfg.amount_cap; ++a)
        small_amounts.push_back(U256(a));
    std::vector<Amount> request_amounts = small_amounts;
    for (std::uint64_t off = cfg.amount_cap; off > 0; --off)
        request_amounts.push_back(U256::sub_wrap(U256::max(), U256(off - 1)));

    const BlockNumber gaps[2] = {1, cfg.delay + 1};
    const BlockNumber lock_offsets[3] = {1, cfg.delay + 1, 4 * (cfg.delay + 1)};
    const BlockNumber horizon = cfg.max_depth * (cfg.delay + 1) + 1;

    struct Node {
        std::shared_ptr<const VaultState> state;
        BlockNumber block;
        std::int64_t parent; // index into nodes, -1 for root
        Record edge;         // action that produced this node
        std::size_t depth;
    };
    std::vector<Node> nodes;
    std::unordered_set<std::string> seen;

    ExploreReport report;
    report.root = root.value();

    nodes.push_back(Node{std::make_shared<VaultState>(std::move(root.value())), 0, -1,
                         Record{}, 0});
    seen.insert(detail::canonical_digest(*nodes[0].state, 0, horizon));

    auto witness_of = [&](std::int64_t node_idx, const Record& last) {
        std::vector<Record> w{last};
        for (std::int64_t i = node_idx; i > 0; i = nodes[static_cast<std::size_t>(i)].parent)
            w.push_back(nodes[static_cast<std::size_t>(i)].edge);
        std::reverse(w.begin(), w.end());
        return w;
    };

    auto flagged = [&](PropertyId p) {
        return std::any_of(report.violations.begin(), report.violations.end(),
                           [&](const Violation& v) { return v.prop == p; });
    };

    auto note_hits = [&](const std::vector<PropertyId>& hits, std::int64_t parent,
                         const Record& rec) {
        for (PropertyId p : hits) {
            if (!flagged(p))
                report.violations.push_back(Violation{p, witness_of(parent, rec), {}});
        }
    };

    // The root itself is a checked state (depth 0).
    for (PropertyId p : check_state(*nodes[0].state))
        report.violations.push_back(Violation{p, {}, "initial state"});

    for (std::size_t at = 0; at < nodes.size() && !report.budget_exceeded; ++at) {
        // BFS: nodes is sorted by depth, so the first witness per property
        // is as short as any within the bound.
        if (nodes[at].depth >= cfg.max_depth)
            continue;
        const VaultState& pre = *nodes[at].state;

        for (BlockNumber gap : gaps) {
            BlockNumber block = nodes[at].block + gap;
            // All rejected edges for this gap share one successor digest.
            std::string idle_digest = detail::canonical_digest(pre, block, horizon);
            bool idle_seen = !seen.insert(idle_digest).second;
            bool idle_enqueued = false;

            auto consider = [&](const Address& sender, const Action& action) {
                if (report.budget_exceeded)
                    return;
                ++report.transitions;
                Transition tr = vault_apply(pre, block, sender, action);
                Record rec{block, sender, action, tr.outcome};

                const VaultState& post = tr.next ? *tr.next : pre;
                note_hits(check_transition(pre, rec, post), static_cast<std::int64_t>(at),
                          rec);
                if (tr.next)
                    note_hits(check_state(post), static_cast<std::int64_t>(at), rec);

                if (tr.next) {
                    std::string digest = detail::canonical_digest(post, block, horizon);
                    if (seen.insert(std::move(digest)).second) {
                        if (nodes.size() >= cfg.max_states) {
                            report.budget_exceeded = true;
                            return;
                        }
                        nodes.push_back(Node{std::make_shared<VaultState>(std::move(*tr.next)),
                                             block, static_cast<std::int64_t>(at), rec,
                                             nodes[at].depth + 1});
                    }
                } else if (!idle_seen && !idle_enqueued) {
                    if (nodes.size() >= cfg.max_states) {
                        report.budget_exceeded = true;
                        return;
                    }
                    // Same vault, later block: pending requests aged.
                    nodes.push_back(Node{nodes[at].state, block,
                                         static_cast<std::int64_t>(at), rec,
                                         nodes[at].depth + 1});
                    idle_enqueued = true;
                }
            };

            for (const Address& sender : universe) {
                if (report.budget_exceeded)
                    break;
                for (const Amount& a : small_amounts)
                    consider(sender, act::Deposit{a});
                for (const Amount& a : request_amounts)
                    for (const Address& rcpt : universe)
                        consider(sender, act::Request{a, rcpt});
                for (const Amount& a : request_amounts)
                    consider(sender, act::Request{a, pre.self});

                std::vector<RequestId> ids{RequestId{}}; // dead-id probe
                for (const Request& r : pre.ledger.iterate())
                    ids.push_back(r.id);
                for (const RequestId& id : ids) {
                    consider(sender, act::Withdraw{id});
                    consider(sender, act::CancelRequest{id});
                    consider(sender, act::CancelSelfRequest{id});
                }
                consider(sender, act::CancelAllRequests{});
                for (BlockNumber off : lock_offsets)
                    consider(sender, act::Lock{block + off});
                for (const Address& a : universe) {
                    consider(sender, act::AddT1{a});
                    consider(sender, act::AddT2{a});
                    consider(sender, act::RemoveT2{a});
                }
                consider(sender, act::Destroy{Address::zero()});
            }
        }
    }

    report.states = nodes.size();

    // Deterministic presentation: shortest witnesses first, ties broken by
    // the serialized trace, then property number.
    std::sort(report.violations.begin(), report.violations.end(),
              [](const Violation& a, const Violation& b) {
                  if (a.witness.size() != b.witness.size())
                      return a.witness.size() < b.witness.size();
                  std::string ea = trace_to_string(a.witness);
                  std::string eb = trace_to_string(b.witness);
                  if (ea != eb)
                      return ea < eb;
                  return a.prop < b.prop;
              });
    return report;
}

} // namespace phoenix
