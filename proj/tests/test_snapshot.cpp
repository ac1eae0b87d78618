#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "phoenix/snapshot.hpp"

using namespace phoenix;

namespace {

const Address kT1 = Address::from_index(0xa);
const Address kCreator = Address::from_index(0xb);
const Address kUser = Address::from_index(0xc);

Chain make(ArithmeticMode mode = ArithmeticMode::fixed) {
    ChainConfig cfg;
    cfg.delay = 2;
    cfg.t1_addr = kT1;
    cfg.creator = kCreator;
    cfg.max_requests = 8;
    cfg.mode = mode;
    auto c = Chain::create(cfg);
    REQUIRE(c.ok());
    return std::move(c.value());
}

// The round-trip property everything else leans on: load(save(x)) saves to
// the same bytes.
void check_roundtrip(const Chain& c) {
    std::string first = snapshot_to_string(c);
    auto back = chain_from_string(first);
    REQUIRE(back.ok());
    CHECK(snapshot_to_string(back.value()) == first);
}

} // namespace

TEST_CASE("snapshot bytes survive a load/save cycle at every stage") {
    Chain c = make();
    check_roundtrip(c); // empty chain

    c.submit(kUser, act::Deposit{U256(10)});
    c.submit(kCreator, act::Request{U256(4), kUser});  // id 1
    c.submit(kCreator, act::Request{U256(2), kUser});  // id 2
    check_roundtrip(c);

    c.submit(kT1, act::CancelAllRequests{}); // sets the watermark
    c.submit(kCreator, act::Request{U256(1), kUser}); // id 3
    check_roundtrip(c);

    REQUIRE(c.advance(4).ok());
    c.submit(kUser, act::Withdraw{U256(3)}); // credits a balance
    c.submit(kT1, act::Lock{1000});
    c.submit(kUser, act::Withdraw{U256(3)}); // rejected: not_found
    check_roundtrip(c);
}

TEST_CASE("a restored chain carries on exactly like the original") {
    Chain a = make();
    a.submit(kUser, act::Deposit{U256(10)});
    a.submit(kCreator, act::Request{U256(4), kUser});

    auto restored = chain_from_string(snapshot_to_string(a));
    REQUIRE(restored.ok());
    Chain b = std::move(restored.value());

    // same watermark and id counter: the next request gets the same id
    REQUIRE(a.advance(3).ok());
    REQUIRE(b.advance(3).ok());
    Outcome oa = a.submit(kUser, act::Withdraw{U256(1)});
    Outcome ob = b.submit(kUser, act::Withdraw{U256(1)});
    CHECK(oa.applied == ob.applied);
    CHECK(snapshot_to_string(a) == snapshot_to_string(b));
}

TEST_CASE("wrapped legacy book state round-trips") {
    Chain c = make(ArithmeticMode::legacy);
    c.submit(kUser, act::Deposit{U256(3)});
    c.submit(kCreator, act::Request{U256(2), kUser});
    c.submit(kCreator, act::Request{U256::sub_wrap(U256::max(), U256(1)), kUser});
    REQUIRE(c.vault().ledger.amount_sum().is_zero());

    auto back = chain_from_string(snapshot_to_string(c));
    REQUIRE(back.ok());
    // the wrapped running sum is reconstructed, not stored
    CHECK(back.value().vault().ledger.amount_sum().is_zero());
    CHECK(back.value().vault().ledger.size() == 2);
    check_roundtrip(c);
}

TEST_CASE("destroyed vaults round-trip") {
    Chain c = make();
    c.submit(kT1, act::Destroy{Address::zero()});
    REQUIRE(c.vault().destroyed);
    auto back = chain_from_string(snapshot_to_string(c));
    REQUIRE(back.ok());
    CHECK(back.value().vault().destroyed);
    check_roundtrip(c);
}

TEST_CASE("malformed snapshots are rejected") {
    Chain c = make();
    c.submit(kUser, act::Deposit{U256(5)});
    c.submit(kCreator, act::Request{U256(4), kUser});
    const json good = chain_to_json(c);

    auto expect_bad = [](json j, const std::string& needle) {
        auto r = chain_from_json(j);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::parse_error);
        INFO(r.detail());
        CHECK(r.detail().find(needle) != std::string::npos);
    };

    CHECK_FALSE(chain_from_string("{oops").ok());
    CHECK_FALSE(chain_from_string("[]").ok());

    json j = good;
    j.erase("vault");
    expect_bad(j, "vault");

    j = good;
    j["vault"].erase("funds");
    expect_bad(j, "funds");

    j = good;
    j["vault"]["t1"] = json::array();
    expect_bad(j, "t1");

    j = good;
    j["vault"]["delay"] = "0";
    expect_bad(j, "delay");

    j = good;
    j["vault"]["mode"] = "sloppy";
    expect_bad(j, "sloppy");

    j = good;
    j["vault"]["requests"][0]["id"] = "7"; // outside the live id window
    expect_bad(j, "window");

    j = good;
    j["vault"]["requests"][0]["creation"] = "99"; // after the snapshot block
    expect_bad(j, "after snapshot");

    j = good;
    j["balances"] = {{"0x000000000000000000000000000000000000000c", "12x"}};
    expect_bad(j, "balance");

    j = good;
    j["trace"][1]["block"] = "1"; // same block as the first record
    expect_bad(j, "increase");

    j = good;
    j["trace"][1]["block"] = "50"; // beyond the snapshot position
    expect_bad(j, "past the snapshot");

    // fixed-mode books must sum without overflow
    j = good;
    j["vault"]["requests"] = json::array(
        {{{"id", "1"},
          {"amount", U256::max().to_decimal()},
          {"recipient", "0x000000000000000000000000000000000000000c"},
          {"creation", "1"},
          {"initiator", "0x000000000000000000000000000000000000000b"}},
         {{"id", "2"},
          {"amount", "1"},
          {"recipient", "0x000000000000000000000000000000000000000c"},
          {"creation", "1"},
          {"initiator", "0x000000000000000000000000000000000000000b"}}});
    j["vault"]["next_id"] = "3";
    expect_bad(j, "overflow");
}

TEST_CASE("randomized workloads round-trip") {
    std::mt19937_64 rng(424242);
    for (int run = 0; run < 60; ++run) {
        Chain c = make(run % 2 ? ArithmeticMode::legacy : ArithmeticMode::fixed);
        const Address folks[] = {kT1, kCreator, kUser};
        for (int step = 0; step < 30; ++step) {
            const Address& who = folks[rng() % 3];
            switch (rng() % 8) {
            case 0: c.submit(who, act::Deposit{U256(rng() % 10)}); break;
            case 1: c.submit(who, act::Request{U256(rng() % 6), kUser}); break;
            case 2: c.submit(who, act::Withdraw{U256(rng() % 5)}); break;
            case 3: c.submit(who, act::CancelRequest{U256(rng() % 5)}); break;
            case 4: c.submit(who, act::CancelAllRequests{}); break;
            case 5: c.submit(who, act::Lock{rng() % 50}); break;
            case 6: REQUIRE(c.advance(1 + rng() % 4).ok()); break;
            default: c.submit(who, act::AddT2{Address::from_index(0xd0 + rng() % 3)}); break;
            }
        }
        check_roundtrip(c);
    }
}
