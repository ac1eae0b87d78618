#pragma once

#include <string>
#include <vector>

#include "phoenix/chain.hpp"
#include "phoenix/properties.hpp"
#include "phoenix/snapshot.hpp"

namespace phoenix {

// Replayable walkthroughs of the two published overflow attacks and the two
// key-compromise recovery drills. Each builds a chain, drives it through
// the story, asserts the numbers it is supposed to produce at every stage,
// and property-checks its own trace: attack runs in legacy arithmetic must
// produce exactly the funds-coverage violation (4.1), everything else none.

struct ScenarioParams {
    Amount k{2};             // pre-existing request volume
    Amount l{2};             // claimed / delay-evading amount, l <= k
    unsigned n = 1;          // drain repetitions (delay evasion)
    Amount initial_funds;    // zero = scenario default
    BlockNumber delay = 2;
};

struct Stage {
    std::string label;
    Amount funds;
    Amount sum;
    std::string note;
};

struct ScenarioResult {
    std::string name;
    ArithmeticMode mode = ArithmeticMode::fixed;
    bool passed = false;
    std::vector<Stage> stages;
    std::vector<std::string> failures; // unmet expectations, in story order
    std::vector<Record> trace;
    std::vector<Violation> violations; // from check_trace over the run
    Chain initial;                      // starting point, for replay/check
    Chain final_chain;
};

namespace scenario_detail {

// Fixed cast. Tier assignments happen per scenario.
inline Address addr_t1() { return Address::from_index(0xa); }
inline Address addr_t2() { return Address::from_index(0xb); }      // creator
inline Address addr_user() { return Address::from_index(0xc); }    // honest recipient
inline Address addr_spare() { return Address::from_index(0xd); }   // replacement keys
inline Address addr_attacker() { return Address::from_index(0xe);} // attacker payout
inline Address addr_faucet() { return Address::from_index(0xf); }  // deposits

struct Runner {
    ScenarioResult result;
    Chain chain;

    Runner(std::string name, Chain c) : chain(std::move(c)) {
        result.name = std::move(name);
        result.mode = chain.vault().ledger.mode();
        result.initial = chain;
    }

    void expect(bool cond, const std::string& what) {
        if (!cond)
            result.failures.push_back(what);
    }

    Outcome step(const Address& sender, const Action& action) {
        return chain.submit(sender, action);
    }

    Outcome expect_applied(const Address& sender, const Action& action,
                           const std::string& what) {
        Outcome o = step(sender, action);
        expect(o.applied, what + " should be accepted" +
                              (o.applied ? "" : std::string(", got ") + error_name(o.error)));
        return o;
    }

    Outcome expect_rejected(const Address& sender, const Action& action, Error want,
                            const std::string& what) {
        Outcome o = step(sender, action);
        expect(!o.applied && o.error == want,
               what + " should be rejected with " + error_name(want));
        return o;
    }

    void stage(const std::string& label, const std::string& note) {
        result.stages.push_back(Stage{label, chain.vault().funds,
                                      chain.vault().ledger.amount_sum(), note});
    }

    void expect_stage(const std::string& label, const Amount& funds, const Amount& sum,
                      const std::string& note) {
        stage(label, note);
        expect(chain.vault().funds == funds,
               label + ": funds should be " + funds.to_decimal() + ", got " +
                   chain.vault().funds.to_decimal());
        expect(chain.vault().ledger.amount_sum() == sum,
               label + ": request sum should be " + sum.to_decimal() + ", got " +
                   chain.vault().ledger.amount_sum().to_decimal());
    }

    // Attack traces in legacy mode must surface exactly the funds-coverage
    // violation; correct-mode runs must be clean.
    void finish(bool expect_coverage_violation) {
        result.trace = chain.trace();
        auto checked = check_trace(result.initial, result.trace);
        if (!checked) {
            result.failures.push_back("trace check failed: " + checked.detail());
        } else {
            result.violations = checked.value().violations;
            if (expect_coverage_violation) {
                expect(result.violations.size() == 1 &&
                           result.violations[0].prop == PropertyId{4, 1},
                       "attack trace should violate exactly property 4.1");
            } else {
                expect(result.violations.empty(),
                       "run should not violate any property");
            }
        }
        result.final_chain = chain;
        result.passed = result.failures.empty();
    }
};

inline Result<Runner> make_runner(const std::string& name, ArithmeticMode mode,
                                  BlockNumber delay, std::size_t capacity) {
    ChainConfig cfg;
    cfg.delay = delay;
    cfg.t1_addr = addr_t1();
    cfg.creator = addr_t2();
    cfg.max_requests = capacity;
    cfg.mode = mode;
    auto chain = Chain::create(cfg);
    if (!chain)
        return {chain.error(), chain.detail()};
    return Runner(name, std::move(chain.value()));
}

} // namespace scenario_detail

// Denial of service through sum wraparound. A tier-2 key plants a request
// for MAX - K + 1 where K is the pending total: in wrapping arithmetic the
// running sum returns to zero, and once any pending request is claimed the
// stored sum wraps to an astronomically large value that no future request
// fits under. Checked admission refuses the planted request instead.
inline Result<ScenarioResult> run_dos(ArithmeticMode mode, ScenarioParams p = {}) {
    using namespace scenario_detail;
    if (p.initial_funds.is_zero())
        p.initial_funds = U256(3);
    if (p.k.is_zero() || p.l.is_zero() || p.l > p.k || p.k > p.initial_funds)
        return {Error::invalid_config, "need 0 < L <= K <= initial funds"};
    if (p.delay < 1)
        return {Error::invalid_config, "delay must be at least 1"};

    auto made = make_runner("dos", mode, p.delay, 8);
    if (!made)
        return {made.error(), made.detail()};
    Runner r = std::move(made.value());

    r.expect_applied(addr_faucet(), act::Deposit{p.initial_funds}, "funding deposit");

    // The pending book: one request of L that will be claimed, padded to a
    // total of K if L < K.
    Outcome claimable =
        r.expect_applied(addr_t2(), act::Request{p.l, addr_user()}, "user request");
    if (p.l < p.k)
        r.expect_applied(addr_t2(), act::Request{U256::sub_wrap(p.k, p.l), addr_user()},
                         "padding request");
    r.expect_stage("stage 1", p.initial_funds, p.k, "pending requests total K");

    Amount poison = U256::add_wrap(U256::sub_wrap(U256::max(), p.k), U256(1)); // MAX-K+1
    Outcome planted = r.step(addr_t2(), act::Request{poison, addr_attacker()});

    if (mode == ArithmeticMode::legacy) {
        r.expect(planted.applied, "overflow request should slip past wrapping admission");
        r.expect_stage("stage 2", p.initial_funds, Amount{},
                       "sum wrapped back to zero; the book hides MAX-K+1 extra");

        r.chain.advance(p.delay); // let the user's request mature
        RequestId claim_id = claimable.effects.created_id.value_or(RequestId{});
        r.expect_applied(addr_user(), act::Withdraw{claim_id}, "user claim of L");
        r.expect_stage("stage 3", U256::sub_wrap(p.initial_funds, p.l),
                       U256::add_wrap(U256::sub_wrap(U256::max(), p.l), U256(1)),
                       "stored sum wrapped below zero: nothing fits under it now");

        // The punchline needs the wrapped sum to stay above the funds when
        // one more coin is asked for; with L = 1 the extra coin wraps the
        // sum a second time and slips through, so only probe for L >= 2.
        if (p.l > U256(1))
            r.expect_rejected(addr_t2(), act::Request{U256(1), addr_user()},
                              Error::insufficient_funds,
                              "1-coin request with funds available");
        r.finish(/*expect_coverage_violation=*/true);
    } else {
        r.expect(!planted.applied && planted.error == Error::overflow,
                 "overflow request should be rejected with overflow");
        r.expect_stage("stage 2", p.initial_funds, p.k, "book unchanged after rejection");
        r.expect_applied(addr_t2(), act::Request{U256(1), addr_user()},
                         "1-coin request after the failed attack");
        r.finish(/*expect_coverage_violation=*/false);
    }
    return r.result;
}

// Withdrawal-delay evasion. Pairs of requests (L, then MAX - L + 1) keep
// the wrapped sum at zero while parking delay-expired requests for L in the
// book. Whenever anyone deposits, the attacker claims one instantly: the
// deposit never enjoys the withdrawal delay. Checked admission rejects the
// pair's second half, so nothing can be parked.
inline Result<ScenarioResult> run_delay_evasion(ArithmeticMode mode,
                                                ScenarioParams p = {}) {
    using namespace scenario_detail;
    if (p.initial_funds.is_zero())
        p.initial_funds = p.k;
    if (p.k.is_zero() || p.l.is_zero() || p.l > p.k || p.k > p.initial_funds)
        return {Error::invalid_config, "need 0 < L <= K <= initial funds"};
    if (p.n < 1)
        return {Error::invalid_config, "need at least one repetition"};
    if (p.delay < 1)
        return {Error::invalid_config, "delay must be at least 1"};

    auto made = make_runner("delay-evasion", mode, p.delay,
                            std::max<std::size_t>(8, 2 + 2 * p.n));
    if (!made)
        return {made.error(), made.detail()};
    Runner r = std::move(made.value());

    r.expect_applied(addr_faucet(), act::Deposit{p.initial_funds}, "funding deposit");
    r.expect_applied(addr_t2(), act::Request{p.k, addr_user()}, "pre-existing request");
    r.expect_stage("stage 1", p.initial_funds, p.k, "an ordinary pending request");

    Amount closer_k = U256::add_wrap(U256::sub_wrap(U256::max(), p.k), U256(1)); // MAX-K+1
    Amount closer_l = U256::add_wrap(U256::sub_wrap(U256::max(), p.l), U256(1)); // MAX-L+1
    Outcome first_closer = r.step(addr_t2(), act::Request{closer_k, addr_attacker()});

    if (mode == ArithmeticMode::fixed) {
        r.expect(!first_closer.applied && first_closer.error == Error::overflow,
                 "ladder's first rung should be rejected with overflow");
        // With the book unchanged an evader only fits if the funds honestly
        // cover K + L; at the default funds == K it cannot even be parked.
        auto honest = U256::add_checked(p.k, p.l);
        if (!honest || *honest > p.initial_funds)
            r.expect_rejected(addr_t2(), act::Request{p.l, addr_attacker()},
                              Error::insufficient_funds, "parked evader request");
        r.finish(/*expect_coverage_violation=*/false);
        return r.result;
    }

    r.expect(first_closer.applied, "sum-zeroing request should slip past admission");
    r.expect_stage("stage 2", p.initial_funds, Amount{}, "wrapped sum reads zero");

    // Park n delay evaders, each followed by its wraparound closer.
    std::vector<RequestId> evaders;
    for (unsigned i = 0; i < p.n; ++i) {
        Outcome evader = r.expect_applied(addr_t2(), act::Request{p.l, addr_attacker()},
                                          "parked evader request");
        if (evader.effects.created_id)
            evaders.push_back(*evader.effects.created_id);
        if (i == 0)
            r.expect_stage("stage 3", p.initial_funds, p.l,
                           "evader parked; sum reads L with the book oversubscribed");
        r.expect_applied(addr_t2(), act::Request{closer_l, addr_attacker()},
                         "closer request");
    }
    r.expect(r.chain.vault().ledger.amount_sum().is_zero(),
             "ladder should leave the wrapped sum at zero");

    r.chain.advance(p.delay); // all parked requests mature
    Amount drained;
    for (RequestId id : evaders) {
        r.expect_applied(addr_faucet(), act::Deposit{p.l}, "victim deposit");
        BlockNumber deposited_at = r.chain.current_block();
        Outcome claim = r.expect_applied(addr_attacker(), act::Withdraw{id},
                                         "instant claim of the fresh deposit");
        r.expect(r.chain.current_block() == deposited_at + 1,
                 "claim should land in the very next block after the deposit");
        if (claim.applied)
            drained = U256::add_wrap(drained, claim.effects.funds_out);
    }
    r.stage("drained", "every deposit claimed with zero post-deposit delay");
    Amount expected_drain = p.l;
    {
        Amount total;
        for (unsigned i = 0; i < p.n; ++i)
            total = U256::add_wrap(total, p.l);
        expected_drain = total;
    }
    r.expect(drained == expected_drain,
             "attacker should drain n*L = " + expected_drain.to_decimal() + ", got " +
                 drained.to_decimal());
    Amount attacker_credit;
    if (auto it = r.chain.balances().find(addr_attacker());
        it != r.chain.balances().end())
        attacker_credit = it->second;
    r.expect(attacker_credit == expected_drain, "drained coins land with the attacker");
    r.finish(/*expect_coverage_violation=*/true);
    return r.result;
}

// Recovery drill: a stolen tier-2 key harasses the book (spurious requests,
// cancelling the owner's own pending request), and a single tier-1 action
// expels the key and atomically clears everything it initiated. A fresh
// tier-2 key then resumes normal service. The thief nets nothing.
inline Result<ScenarioResult> run_type2_recovery(ArithmeticMode mode) {
    using namespace scenario_detail;
    auto made = make_runner("type2-recovery", mode, /*delay=*/6, 8);
    if (!made)
        return {made.error(), made.detail()};
    Runner r = std::move(made.value());

    r.expect_applied(addr_faucet(), act::Deposit{U256(5)}, "funding deposit");
    Outcome legit = r.expect_applied(addr_t2(), act::Request{U256(2), addr_user()},
                                     "owner's pending payout");
    RequestId legit_id = legit.effects.created_id.value_or(RequestId{});

    // Key theft: the attacker holds the tier-2 key now.
    std::vector<RequestId> stolen_ids;
    for (int i = 0; i < 3; ++i) {
        Outcome o = r.expect_applied(addr_t2(), act::Request{U256(1), addr_attacker()},
                                     "thief request");
        if (o.effects.created_id)
            stolen_ids.push_back(*o.effects.created_id);
    }
    r.expect_applied(addr_t2(), act::CancelSelfRequest{legit_id},
                     "thief cancelling the owner's payout");
    r.expect_stage("compromise", U256(5), U256(3),
                   "thief request book in place, owner's payout gone");

    // One tier-1 action undoes all of it.
    Outcome purge = r.expect_applied(addr_t1(), act::RemoveT2{addr_t2()},
                                     "tier-1 expelling the stolen key");
    r.expect(purge.effects.removed_ids.size() == stolen_ids.size(),
             "every thief request should vanish with the expulsion");
    r.expect(r.chain.vault().ledger.size() == 0, "book should be empty after expulsion");
    r.expect_stage("expelled", U256(5), Amount{}, "stolen key out, book clean");

    r.expect_applied(addr_t1(), act::AddT2{addr_spare()}, "appointing a fresh tier-2 key");
    Outcome renewed = r.expect_applied(addr_spare(), act::Request{U256(2), addr_user()},
                                       "re-issued payout");
    r.chain.advance(r.chain.vault().delay + 1);
    r.expect_applied(addr_user(),
                     act::Withdraw{renewed.effects.created_id.value_or(RequestId{})},
                     "normal withdrawal after recovery");

    // The expelled key is powerless and the thief walked away empty-handed.
    r.expect_rejected(addr_t2(), act::Request{U256(1), addr_attacker()},
                      Error::unauthorized, "expelled key requesting again");
    if (!stolen_ids.empty())
        r.expect_rejected(addr_attacker(), act::Withdraw{stolen_ids[0]}, Error::not_found,
                          "claiming a purged request");
    r.expect(r.chain.balances().count(addr_attacker()) == 0, "thief nets nothing");
    r.expect_stage("recovered", U256(3), Amount{},
                   "owner paid out 2 of 5; service back to normal");
    r.finish(/*expect_coverage_violation=*/false);
    return r.result;
}

// Lockdown drill: a stolen tier-1 key can appoint rogue tier-2 keys and
// fill the book, but a surviving tier-1 key cancels everything in one
// action and locks the vault far into the future. Nothing can leave while
// locked, including the owner's own withdrawals: safety at the price of a
// freeze.
inline Result<ScenarioResult> run_type1_lockdown(ArithmeticMode mode) {
    using namespace scenario_detail;
    auto made = make_runner("type1-lockdown", mode, /*delay=*/2, 8);
    if (!made)
        return {made.error(), made.detail()};
    Runner r = std::move(made.value());

    r.expect_applied(addr_faucet(), act::Deposit{U256(5)}, "funding deposit");
    r.expect_applied(addr_t1(), act::AddT1{addr_spare()}, "standby tier-1 key");

    // Key theft: the original tier-1 key goes rogue.
    r.expect_applied(addr_t1(), act::AddT2{addr_attacker()}, "rogue tier-2 appointment");
    Outcome rogue1 = r.expect_applied(addr_attacker(),
                                      act::Request{U256(3), addr_attacker()},
                                      "rogue request");
    r.expect_applied(addr_attacker(), act::Request{U256(2), addr_attacker()},
                     "second rogue request");
    r.expect_stage("compromise", U256(5), U256(5), "book full of rogue requests");

    // The standby key sweeps the book and throws the big switch.
    Outcome sweep = r.expect_applied(addr_spare(), act::CancelAllRequests{},
                                     "standby key sweeping the book");
    r.expect(sweep.effects.removed_ids.size() == 2, "one action clears every request");
    BlockNumber far = r.chain.current_block() + 10000;
    r.expect_applied(addr_spare(), act::Lock{far}, "locking far into the future");
    r.expect_stage("lockdown", U256(5), Amount{}, "book swept, vault locked");

    // The rogue key can still make noise, but nothing can leave.
    Outcome rogue2 = r.expect_applied(addr_attacker(),
                                      act::Request{U256(3), addr_attacker()},
                                      "rogue request while locked");
    r.chain.advance(r.chain.vault().delay + 1);
    r.expect_rejected(addr_attacker(),
                      act::Withdraw{rogue2.effects.created_id.value_or(RequestId{})},
                      Error::locked, "rogue claim while locked");
    (void)rogue1;

    // Symmetric cost: the owner's withdrawals freeze too.
    Outcome own = r.expect_applied(addr_t2(), act::Request{U256(1), addr_user()},
                                   "owner request while locked");
    r.chain.advance(r.chain.vault().delay + 1);
    r.expect_rejected(addr_user(),
                      act::Withdraw{own.effects.created_id.value_or(RequestId{})},
                      Error::locked, "owner claim while locked");

    r.expect(r.chain.vault().funds == U256(5), "funds fully preserved");
    r.expect(r.chain.credited_total().is_zero(), "nothing left the vault");
    r.expect_stage("held", U256(5), U256(4), "funds intact until the unlock point");
    r.finish(/*expect_coverage_violation=*/false);
    return r.result;
}

} // namespace phoenix
