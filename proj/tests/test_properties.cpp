#include <catch2/catch_amalgamated.hpp>

#include "phoenix/properties.hpp"

using namespace phoenix;

namespace {

const Address kT1 = Address::from_index(0xa);
const Address kCreator = Address::from_index(0xb);
const Address kUser = Address::from_index(0xc);
const Address kSpare = Address::from_index(0xd);

ChainConfig config(ArithmeticMode mode = ArithmeticMode::fixed, BlockNumber delay = 2,
                   Fault fault = Fault::none) {
    ChainConfig cfg;
    cfg.delay = delay;
    cfg.t1_addr = kT1;
    cfg.creator = kCreator;
    cfg.max_requests = 8;
    cfg.mode = mode;
    cfg.fault = fault;
    return cfg;
}

Chain make(ArithmeticMode mode = ArithmeticMode::fixed, BlockNumber delay = 2,
           Fault fault = Fault::none) {
    auto c = Chain::create(config(mode, delay, fault));
    REQUIRE(c.ok());
    return std::move(c.value());
}

VaultState healthy() {
    auto v = vault_new(2, kT1, kCreator, 8, ArithmeticMode::fixed);
    REQUIRE(v.ok());
    return std::move(v.value());
}

bool hits(const std::vector<PropertyId>& v, PropertyId p) {
    return std::find(v.begin(), v.end(), p) != v.end();
}

std::vector<PropertyId> violated_props(const TraceCheck& tc) {
    std::vector<PropertyId> out;
    for (const Violation& v : tc.violations)
        out.push_back(v.prop);
    return out;
}

} // namespace

TEST_CASE("the property table is complete and unambiguous") {
    const auto& table = all_properties();
    REQUIRE(table.size() == 18);
    for (std::size_t i = 1; i < table.size(); ++i)
        CHECK(table[i - 1].id < table[i].id);
    CHECK(table.front().id.to_string() == "1.1");
    CHECK(table.back().id.to_string() == "4.4");
}

TEST_CASE("state invariants on a clean vault") {
    CHECK(check_state(healthy()).empty());
}

TEST_CASE("state invariant: tier overlap") {
    VaultState v = healthy();
    v.t2.insert(kT1);
    auto r = check_state(v);
    CHECK(r == std::vector<PropertyId>{{2, 1}});
}

TEST_CASE("state invariant: uncovered request sum") {
    VaultState v = healthy();
    v.funds = U256(3);
    v.ledger.force_insert(U256(5), kUser, 1, kCreator);
    CHECK(check_state(v) == std::vector<PropertyId>{{4, 1}});
    v.funds = U256(5);
    CHECK(check_state(v).empty()); // covered exactly
}

TEST_CASE("state invariant: recipient screening") {
    VaultState v = healthy();
    v.funds = U256(10);
    v.ledger.force_insert(U256(1), v.self, 1, kCreator);
    CHECK(hits(check_state(v), {4, 2}));

    VaultState w = healthy();
    w.funds = U256(10);
    w.ledger.force_insert(U256(1), Address::zero(), 1, kCreator);
    CHECK(hits(check_state(w), {4, 3}));
}

TEST_CASE("state invariant: orphaned initiator") {
    VaultState v = healthy();
    v.funds = U256(10);
    v.ledger.force_insert(U256(1), kUser, 1, kSpare); // kSpare is not tier-2
    CHECK(check_state(v) == std::vector<PropertyId>{{4, 4}});
}

TEST_CASE("a destroyed vault is out of scope for state checks") {
    VaultState v = healthy();
    v.funds = U256(0);
    v.ledger.force_insert(U256(5), Address::zero(), 1, kSpare);
    v.destroyed = true;
    CHECK(check_state(v).empty());
}

TEST_CASE("transition rules, one by one") {
    VaultState v = healthy();
    v.funds = U256(10);
    v.ledger.force_insert(U256(4), kUser, 1, kCreator); // id 1, creation 1, delay 2

    SECTION("1.1 premature withdrawal") {
        VaultState post = v;
        REQUIRE(post.ledger.remove(U256(1)).ok());
        post.funds = U256(6);
        Record rec{3, kUser, act::Withdraw{U256(1)}, Outcome::ok()}; // 3 == 1+2
        CHECK(hits(check_transition(v, rec, post), {1, 1}));
        rec.block = 4;
        CHECK(check_transition(v, rec, post).empty());
    }
    SECTION("1.2 refused tier-1 cancellation") {
        Record rec{2, kT1, act::CancelRequest{U256(1)}, Outcome::reject(Error::locked)};
        CHECK(check_transition(v, rec, v) == std::vector<PropertyId>{{1, 2}});
        // not owed to other tiers, or for dead ids, or when it worked
        rec.sender = kCreator;
        CHECK(check_transition(v, rec, v).empty());
        rec = Record{2, kT1, act::CancelRequest{U256(9)}, Outcome::reject(Error::not_found)};
        CHECK(check_transition(v, rec, v).empty());
        VaultState post = v;
        REQUIRE(post.ledger.remove(U256(1)).ok());
        rec = Record{2, kT1, act::CancelRequest{U256(1)}, Outcome::ok()};
        CHECK(check_transition(v, rec, post).empty());
    }
    SECTION("1.3 delay drift") {
        VaultState post = v;
        post.delay = 3;
        Record rec{2, kT1, act::Lock{50}, Outcome::ok()};
        post.unlock = 50;
        CHECK(hits(check_transition(v, rec, post), {1, 3}));
    }
    SECTION("1.4 shrinking tier-1") {
        VaultState post = v;
        post.t1 = {kSpare}; // replaced instead of extended
        Record rec{2, kT1, act::AddT1{kSpare}, Outcome::ok()};
        CHECK(hits(check_transition(v, rec, post), {1, 4}));
        post.t1 = {kT1, kSpare};
        CHECK(check_transition(v, rec, post).empty());
    }
    SECTION("1.5 destruction with funds inside") {
        VaultState post = v;
        post.destroyed = true;
        post.funds = U256(0);
        Record rec{2, kT1, act::Destroy{kUser}, Outcome::ok()};
        CHECK(hits(check_transition(v, rec, post), {1, 5}));
    }
    SECTION("2.2 / 3.5 / 3.3 / 3.4 tier-1 exclusives by other senders") {
        VaultState post = v;
        post.t1.insert(kSpare);
        CHECK(hits(check_transition(v, {2, kCreator, act::AddT1{kSpare}, Outcome::ok()}, post),
                   {2, 2}));
        post = v;
        post.t2.insert(kSpare);
        CHECK(hits(check_transition(v, {2, kUser, act::AddT2{kSpare}, Outcome::ok()}, post),
                   {3, 5}));
        post = v;
        post.unlock = 9;
        CHECK(hits(check_transition(v, {2, kCreator, act::Lock{9}, Outcome::ok()}, post),
                   {3, 3}));
        post = v;
        post.t2.erase(kCreator);
        CHECK(hits(check_transition(v, {2, kUser, act::RemoveT2{kCreator}, Outcome::ok()}, post),
                   {3, 4}));
    }
    SECTION("2.3 requests from outside tier-2") {
        VaultState post = v;
        post.ledger.force_insert(U256(1), kUser, 2, kUser);
        Record rec{2, kUser, act::Request{U256(1), kUser}, Outcome::ok()};
        auto r = check_transition(v, rec, post);
        CHECK(hits(r, {2, 3}));
        rec.sender = kCreator;
        CHECK_FALSE(hits(check_transition(v, rec, post), {2, 3}));
    }
    SECTION("2.4 cancelling a request one does not own") {
        VaultState post = v;
        REQUIRE(post.ledger.remove(U256(1)).ok());
        VaultState pre = v;
        pre.t2.insert(kSpare); // a second tier-2 member, not the initiator
        Record rec{2, kSpare, act::CancelSelfRequest{U256(1)}, Outcome::ok()};
        CHECK(hits(check_transition(pre, rec, post), {2, 4}));
        rec.sender = kCreator; // the initiator: fine
        CHECK(check_transition(pre, rec, post).empty());
    }
    SECTION("3.1 outflow while locked") {
        VaultState pre = v;
        pre.unlock = 100;
        VaultState post = pre;
        REQUIRE(post.ledger.remove(U256(1)).ok());
        post.funds = U256(6);
        Record rec{50, kUser, act::Withdraw{U256(1)}, Outcome::ok()};
        auto r = check_transition(pre, rec, post);
        CHECK(hits(r, {3, 1}));
        // after the unlock point the same outflow is fine
        rec.block = 101;
        CHECK_FALSE(hits(check_transition(pre, rec, post), {3, 1}));
    }
    SECTION("3.2 unlock moving backwards") {
        VaultState pre = v;
        pre.unlock = 100;
        VaultState post = pre;
        post.unlock = 10;
        Record rec{2, kT1, act::Lock{10}, Outcome::ok()};
        CHECK(hits(check_transition(pre, rec, post), {3, 2}));
    }
    SECTION("destroyed pre-states and outcome-less records are skipped") {
        VaultState dead = v;
        dead.destroyed = true;
        Record rec{2, kUser, act::Withdraw{U256(1)}, Outcome::ok()};
        CHECK(check_transition(dead, rec, dead).empty());
        Record quiet{2, kT1, act::Lock{5}, std::nullopt};
        VaultState post = v;
        post.unlock = 0;
        post.delay = 9; // would be 1.3 if the record were judged
        CHECK(check_transition(v, quiet, post).empty());
    }
}

TEST_CASE("a clean recorded run checks out") {
    Chain start = make();
    Chain c = start;
    c.submit(kUser, act::Deposit{U256(10)});
    c.submit(kCreator, act::Request{U256(4), kUser});
    REQUIRE(c.advance(3).ok());
    c.submit(kUser, act::Withdraw{U256(1)});
    c.submit(kT1, act::Lock{100});
    c.submit(kT1, act::AddT2{kSpare});

    auto r = check_trace(start, c.trace());
    REQUIRE(r.ok());
    CHECK(r.value().violations.empty());
    CHECK(r.value().steps == 5);
    CHECK(r.value().final_state.funds == U256(6));
    CHECK(r.value().final_state.unlock == 100);
}

TEST_CASE("the wrapped-sum attack is caught as an uncovered book") {
    Chain start = make(ArithmeticMode::legacy);
    Chain c = start;
    c.submit(kUser, act::Deposit{U256(3)});
    c.submit(kCreator, act::Request{U256(2), kUser});
    c.submit(kCreator, act::Request{U256::sub_wrap(U256::max(), U256(1)), kUser});
    REQUIRE(c.advance(2).ok());
    c.submit(kUser, act::Withdraw{U256(1)}); // funds 1, book claims MAX-1

    auto r = check_trace(start, c.trace());
    REQUIRE(r.ok());
    REQUIRE(r.value().violations.size() == 1);
    const Violation& v = r.value().violations[0];
    CHECK(v.prop == PropertyId{4, 1});
    CHECK(v.witness.size() == 4); // everything up to and including the withdrawal
    CHECK(trace_to_string(v.witness) ==
          trace_to_string({c.trace().begin(), c.trace().begin() + 4}));

    // the same actions under checked arithmetic stay clean
    Chain fstart = make(ArithmeticMode::fixed);
    Chain f = fstart;
    for (const Record& rec : c.trace()) {
        BlockNumber gap = rec.block - f.current_block();
        if (gap > 1)
            REQUIRE(f.advance(gap - 1).ok());
        f.submit(rec.sender, rec.action);
    }
    auto rf = check_trace(fstart, f.trace());
    REQUIRE(rf.ok());
    CHECK(rf.value().violations.empty());
}

TEST_CASE("each violation is reported once, at its first occurrence") {
    Chain start = make(ArithmeticMode::legacy);
    Chain c = start;
    c.submit(kUser, act::Deposit{U256(6)});
    c.submit(kCreator, act::Request{U256(2), kUser});
    c.submit(kCreator, act::Request{U256(2), kUser});
    c.submit(kCreator, act::Request{U256::sub_wrap(U256::max(), U256(3)), kUser});
    REQUIRE(c.advance(2).ok());
    c.submit(kUser, act::Withdraw{U256(1)}); // first 4.1
    c.submit(kUser, act::Withdraw{U256(2)}); // 4.1 again, deeper

    auto r = check_trace(start, c.trace());
    REQUIRE(r.ok());
    REQUIRE(r.value().violations.size() == 1);
    CHECK(r.value().violations[0].witness.size() == 5);
}

TEST_CASE("hand-edited traces are judged on their claims") {
    Chain start = make();

    SECTION("a claimed unlock rollback") {
        std::vector<Record> records{
            {1, kT1, act::Lock{100}, Outcome::ok()},
            {2, kT1, act::Lock{10}, Outcome::ok()}, // forged: the vault would refuse
        };
        auto r = check_trace(start, records);
        REQUIRE(r.ok());
        REQUIRE(r.value().violations.size() == 1);
        CHECK(r.value().violations[0].prop == PropertyId{3, 2});
        CHECK(r.value().final_state.unlock == 10); // the claim was mirrored
    }
    SECTION("a claimed unauthorized request") {
        std::vector<Record> records{
            {1, kUser, act::Deposit{U256(5)}, Outcome::ok()},
            {2, kUser, act::Request{U256(1), kSpare}, Outcome::ok()},
        };
        auto r = check_trace(start, records);
        REQUIRE(r.ok());
        auto props = violated_props(r.value());
        CHECK(hits(props, {2, 3})); // outsider made a request
        CHECK(hits(props, {4, 4})); // and the book now has an orphan entry
    }
    SECTION("claimed rejections leave the state alone") {
        std::vector<Record> records{
            {1, kUser, act::Deposit{U256(5)}, Outcome::reject(Error::destroyed)},
        };
        auto r = check_trace(start, records);
        REQUIRE(r.ok());
        CHECK(r.value().violations.empty());
        CHECK(r.value().final_state.funds.is_zero());
    }
}

TEST_CASE("structurally impossible claims are divergence, not violations") {
    Chain start = make();

    SECTION("withdrawing a request that never existed") {
        std::vector<Record> records{{1, kUser, act::Withdraw{U256(9)}, Outcome::ok()}};
        auto r = check_trace(start, records);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::replay_divergence);
    }
    SECTION("spending beyond the balance") {
        std::vector<Record> records{
            {1, kUser, act::Deposit{U256(2)}, Outcome::ok()},
            {2, kCreator, act::Request{U256(5), kUser}, Outcome::ok()}, // forged admit
            {9, kUser, act::Withdraw{U256(1)}, Outcome::ok()},
        };
        auto r = check_trace(start, records);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::replay_divergence);
        CHECK(r.detail().find("balance") != std::string::npos);
    }
    SECTION("acting on a destroyed vault") {
        std::vector<Record> records{
            {1, kT1, act::Destroy{Address::zero()}, Outcome::ok()},
            {2, kUser, act::Deposit{U256(1)}, Outcome::ok()},
        };
        auto r = check_trace(start, records);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::replay_divergence);
    }
    SECTION("non-increasing blocks") {
        std::vector<Record> records{
            {1, kUser, act::Deposit{U256(1)}, Outcome::ok()},
            {1, kUser, act::Deposit{U256(1)}, Outcome::ok()},
        };
        auto r = check_trace(start, records);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::parse_error);
    }
}

TEST_CASE("outcome-less records run under the real rules") {
    Chain start = make();
    std::vector<Record> records{
        {1, kUser, act::Deposit{U256(5)}, std::nullopt},
        {2, kUser, act::Lock{50}, std::nullopt}, // really rejected: unauthorized
    };
    auto r = check_trace(start, records);
    REQUIRE(r.ok());
    CHECK(r.value().violations.empty());
    CHECK(r.value().final_state.funds == U256(5));
    CHECK(r.value().final_state.unlock == 0); // the rejection stuck
}

TEST_CASE("a pre-violated starting state is reported with an empty witness") {
    Chain start = make();
    start.vault_mut().funds = U256(1);
    start.vault_mut().ledger.force_insert(U256(5), kUser, 0, kCreator);

    auto r = check_trace(start, {});
    REQUIRE(r.ok());
    REQUIRE(r.value().violations.size() == 1);
    CHECK(r.value().violations[0].prop == PropertyId{4, 1});
    CHECK(r.value().violations[0].witness.empty());
}

TEST_CASE("faulty vaults are flagged from their own recorded traces") {
    struct Case {
        Fault fault;
        PropertyId expect;
    };

    SECTION("an unlock rollback by a buggy lock rule") {
        Chain start = make(ArithmeticMode::fixed, 2, Fault::lock_allows_decrease);
        Chain c = start;
        c.submit(kT1, act::Lock{100});
        c.submit(kT1, act::Lock{5});
        auto r = check_trace(start, c.trace());
        REQUIRE(r.ok());
        CHECK(violated_props(r.value()) == std::vector<PropertyId>{{3, 2}});
    }
    SECTION("a boundary-block withdrawal by a buggy delay rule") {
        Chain start = make(ArithmeticMode::fixed, 2, Fault::withdraw_delay_off_by_one);
        Chain c = start;
        c.submit(kUser, act::Deposit{U256(5)});
        c.submit(kCreator, act::Request{U256(2), kUser}); // creation 2
        REQUIRE(c.advance(1).ok());
        c.submit(kUser, act::Withdraw{U256(1)}); // block 4 == 2+2
        auto r = check_trace(start, c.trace());
        REQUIRE(r.ok());
        CHECK(violated_props(r.value()) == std::vector<PropertyId>{{1, 1}});
    }
    SECTION("a refused cancellation by a buggy cancel rule") {
        Chain start = make(ArithmeticMode::fixed, 2, Fault::cancel_fails_when_locked);
        Chain c = start;
        c.submit(kUser, act::Deposit{U256(5)});
        c.submit(kCreator, act::Request{U256(2), kUser});
        c.submit(kT1, act::Lock{100});
        c.submit(kT1, act::CancelRequest{U256(1)}); // rejected: locked
        auto r = check_trace(start, c.trace());
        REQUIRE(r.ok());
        CHECK(violated_props(r.value()) == std::vector<PropertyId>{{1, 2}});
    }
}
