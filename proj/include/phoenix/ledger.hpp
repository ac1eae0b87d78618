#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "phoenix/address.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/u256.hpp"

namespace phoenix {

using BlockNumber = std::uint64_t;
using Amount = U256;
using RequestId = U256;

enum class ArithmeticMode {
    legacy, // 256-bit wrapping sums: reproduces the published overflow bug
    fixed,  // overflow during admission rejects the request
};

inline const char* mode_name(ArithmeticMode m) {
    return m == ArithmeticMode::legacy ? "legacy" : "fixed";
}

inline std::optional<ArithmeticMode> mode_from_name(std::string_view s) {
    if (s == "legacy")
        return ArithmeticMode::legacy;
    if (s == "fixed")
        return ArithmeticMode::fixed;
    return std::nullopt;
}

// One pending withdrawal.
struct Request {
    RequestId id;
    Amount amount;
    Address recipient;
    BlockNumber creation; // block at which the request was made
    Address initiator;    // tier-two address that made it

    friend bool operator==(const Request&, const Request&) = default;
};

// Pending-withdrawal book: a doubly-linked list threaded through an id map.
//
// Layout follows the on-chain design it models:
//  - ids come from an ascending counter, never reused;
//  - single removal unlinks and erases in O(1);
//  - cancel_all is O(1) via the `lastid` watermark: it forgets the whole
//    list without touching nodes, and lookups treat any id <= lastid as
//    dead. Watermarked nodes stay in the map (lazy deletion), exactly like
//    contract storage that is never reclaimed;
//  - a capacity cap fixed at construction bounds the live size.
//
// amount_sum is the running sum of live amounts as the contract itself
// would compute it: exact in fixed mode (admission rejects overflow),
// wrapping mod 2^256 in legacy mode.
class Ledger {
public:
    static Result<Ledger> create(std::size_t max_size, ArithmeticMode mode) {
        if (max_size == 0)
            return {Error::invalid_config, "max_size must be at least 1"};
        Ledger l;
        l.max_size_ = max_size;
        l.mode_ = mode;
        return l;
    }

    std::size_t size() const { return size_; }
    std::size_t max_size() const { return max_size_; }
    ArithmeticMode mode() const { return mode_; }
    const Amount& amount_sum() const { return sum_; }
    const RequestId& next_id() const { return next_id_; }
    const RequestId& lastid() const { return lastid_; }

    // Admission: zero amounts never enter; the live count respects the cap;
    // and the new sum must be covered by `funds`, where "new sum" is either
    // overflow-checked (fixed) or silently wrapped (legacy). The caller can
    // force the wrapping path in fixed mode via skip_overflow_check; that
    // hook exists only so one-rule-broken variants can be built for checker
    // self-tests.
    Result<RequestId> insert(const Amount& amount, const Address& recipient,
                             BlockNumber creation, const Address& initiator,
                             const Amount& funds, bool skip_overflow_check = false) {
        if (amount.is_zero())
            return {Error::zero_amount};
        if (size_ >= max_size_)
            return {Error::ledger_full};
        if (next_id_ == U256::max())
            return {Error::internal_overflow, "request id counter exhausted"};

        Amount new_sum;
        if (mode_ == ArithmeticMode::fixed && !skip_overflow_check) {
            auto checked = U256::add_checked(sum_, amount);
            if (!checked)
                return {Error::overflow};
            new_sum = *checked;
        } else {
            new_sum = U256::add_wrap(sum_, amount);
        }
        if (new_sum > funds)
            return {Error::insufficient_funds};

        RequestId id = next_id_;
        next_id_ = U256::add_wrap(next_id_, U256(1));
        Node node{Request{id, amount, recipient, creation, initiator}, tail_, RequestId{}};
        if (tail_.is_zero())
            head_ = id;
        else
            nodes_.at(tail_).next = id;
        tail_ = id;
        nodes_.emplace(id, node);
        ++size_;
        sum_ = new_sum;
        return id;
    }

    // Live iff the id is above the cancellation watermark and present.
    const Request* get(const RequestId& id) const {
        if (id <= lastid_)
            return nullptr;
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second.req;
    }

    Result<Request> remove(const RequestId& id) {
        if (id <= lastid_)
            return {Error::not_found};
        auto it = nodes_.find(id);
        if (it == nodes_.end())
            return {Error::not_found};
        Request out = it->second.req;
        unlink(it->second);
        nodes_.erase(it);
        --size_;
        sum_ = U256::sub_wrap(sum_, out.amount);
        return out;
    }

    // O(1) bulk cancel: everything at or below the watermark is dead.
    std::size_t cancel_all() {
        std::size_t n = size_;
        head_ = RequestId{};
        tail_ = RequestId{};
        size_ = 0;
        sum_ = Amount{};
        lastid_ = U256::sub_wrap(next_id_, U256(1));
        return n;
    }

    // Removes every live request made by `initiator`, preserving the order
    // of survivors. Linear in the live size.
    std::vector<RequestId> remove_by_initiator(const Address& initiator) {
        std::vector<RequestId> removed;
        RequestId cur = head_;
        while (!cur.is_zero()) {
            auto& node = nodes_.at(cur);
            RequestId next = node.next;
            if (node.req.initiator == initiator) {
                removed.push_back(cur);
                sum_ = U256::sub_wrap(sum_, node.req.amount);
                unlink(node);
                nodes_.erase(cur);
                --size_;
            }
            cur = next;
        }
        return removed;
    }

    // Appends without admission checks: no cap, no funds coverage, wrapping
    // sum. This is how a trace *claiming* an accepted request is mirrored
    // into state when checking foreign or hand-edited traces; the vault's
    // own transition rules never call it.
    RequestId force_insert(const Amount& amount, const Address& recipient,
                           BlockNumber creation, const Address& initiator) {
        RequestId id = next_id_;
        next_id_ = U256::add_wrap(next_id_, U256(1));
        Node node{Request{id, amount, recipient, creation, initiator}, tail_, RequestId{}};
        if (tail_.is_zero())
            head_ = id;
        else
            nodes_.at(tail_).next = id;
        tail_ = id;
        nodes_.emplace(id, node);
        ++size_;
        sum_ = U256::add_wrap(sum_, amount);
        return id;
    }

    // Rebuilds a ledger from persisted live requests (list order) plus the
    // two counters. The sum is recomputed, wrapping in legacy mode; a
    // fixed-mode snapshot whose amounts cannot sum without overflow is
    // rejected as inconsistent.
    static Result<Ledger> restore(std::size_t max_size, ArithmeticMode mode,
                                  const std::vector<Request>& requests,
                                  const RequestId& next_id, const RequestId& lastid) {
        auto made = create(max_size, mode);
        if (!made)
            return made;
        Ledger l = std::move(made.value());
        if (requests.size() > max_size)
            return {Error::parse_error, "more live requests than capacity"};
        if (lastid >= next_id)
            return {Error::parse_error, "lastid must be below next_id"};
        RequestId prev{};
        for (const Request& r : requests) {
            if (r.amount.is_zero())
                return {Error::parse_error, "zero amount in request " + r.id.to_decimal()};
            if (r.id <= lastid || r.id >= next_id)
                return {Error::parse_error, "request id " + r.id.to_decimal() +
                                                " outside live window"};
            if (!prev.is_zero() && r.id <= prev)
                return {Error::parse_error, "request ids not ascending"};
            prev = r.id;
            if (mode == ArithmeticMode::fixed) {
                auto s = U256::add_checked(l.sum_, r.amount);
                if (!s)
                    return {Error::parse_error, "request amounts overflow in fixed mode"};
            }
            Node node{r, l.tail_, RequestId{}};
            if (l.tail_.is_zero())
                l.head_ = r.id;
            else
                l.nodes_.at(l.tail_).next = r.id;
            l.tail_ = r.id;
            l.nodes_.emplace(r.id, node);
            ++l.size_;
            l.sum_ = U256::add_wrap(l.sum_, r.amount);
        }
        l.next_id_ = next_id;
        l.lastid_ = lastid;
        return l;
    }

    // Live requests in list order (insertion order).
    std::vector<Request> iterate() const {
        std::vector<Request> out;
        out.reserve(size_);
        RequestId cur = head_;
        while (!cur.is_zero()) {
            const Node& node = nodes_.at(cur);
            out.push_back(node.req);
            cur = node.next;
        }
        return out;
    }

    // Structural self-check used by tests: link symmetry, size, watermark
    // discipline, id ordering, and the mode-appropriate sum.
    Status validate() const {
        std::size_t n = 0;
        Amount sum;
        RequestId prev{};
        RequestId cur = head_;
        while (!cur.is_zero()) {
            auto it = nodes_.find(cur);
            if (it == nodes_.end())
                return {Error::internal_overflow, "dangling link " + cur.to_decimal()};
            const Node& node = it->second;
            if (node.prev != prev)
                return {Error::internal_overflow, "bad prev link at " + cur.to_decimal()};
            if (node.req.id != cur)
                return {Error::internal_overflow, "id mismatch at " + cur.to_decimal()};
            if (cur <= lastid_ || cur >= next_id_)
                return {Error::internal_overflow, "id outside live window"};
            if (!prev.is_zero() && cur <= prev)
                return {Error::internal_overflow, "ids not ascending"};
            if (node.req.amount.is_zero())
                return {Error::internal_overflow, "zero amount stored"};
            sum = U256::add_wrap(sum, node.req.amount);
            prev = cur;
            ++n;
            cur = node.next;
        }
        if (prev != tail_)
            return {Error::internal_overflow, "tail mismatch"};
        if (n != size_)
            return {Error::internal_overflow, "size mismatch"};
        if (n > max_size_)
            return {Error::internal_overflow, "over capacity"};
        if (sum != sum_)
            return {Error::internal_overflow, "sum mismatch"};
        return {};
    }

private:
    friend struct LedgerTestAccess;

    struct Node {
        Request req;
        RequestId prev; // zero = none
        RequestId next; // zero = none
    };

    void unlink(const Node& node) {
        if (node.prev.is_zero())
            head_ = node.next;
        else
            nodes_.at(node.prev).next = node.next;
        if (node.next.is_zero())
            tail_ = node.prev;
        else
            nodes_.at(node.next).prev = node.prev;
    }

    std::unordered_map<RequestId, Node, U256Hash> nodes_;
    RequestId head_{};           // zero = empty
    RequestId tail_{};
    std::size_t size_ = 0;
    std::size_t max_size_ = 0;
    RequestId next_id_{1};       // ids start at 1; 0 is the null sentinel
    RequestId lastid_{};         // highest id ever cancelled in bulk
    Amount sum_{};
    ArithmeticMode mode_ = ArithmeticMode::fixed;
};

// Test backdoor for states unreachable in sane time (id counter exhaustion).
struct LedgerTestAccess {
    static void set_next_id(Ledger& l, const RequestId& id) { l.next_id_ = id; }
};

} // namespace phoenix
