#pragma once

#include <map>
#include <vector>

#include "phoenix/trace.hpp"
#include "phoenix/vault.hpp"

namespace phoenix {

// Everything needed to stand up a vault at block zero.
struct ChainConfig {
    BlockNumber delay = 1;
    Address t1_addr;
    Address creator;
    std::size_t max_requests = 8;
    ArithmeticMode mode = ArithmeticMode::fixed;
    Address self = vault_self_address();
    Fault fault = Fault::none;
};

// Single-vault block chain abstraction: one action per block, submitted in
// program order. Deposits conjure coins (the faucet is off-chain identity);
// applied withdrawals credit an external balance map, so every coin can be
// accounted for: deposited == vault funds + sum of external balances.
class Chain {
public:
    static Result<Chain> create(const ChainConfig& cfg) {
        auto vault = vault_new(cfg.delay, cfg.t1_addr, cfg.creator, cfg.max_requests,
                               cfg.mode, cfg.self, cfg.fault);
        if (!vault)
            return {vault.error(), vault.detail()};
        Chain c;
        c.vault_ = std::move(vault.value());
        return c;
    }

    const VaultState& vault() const { return vault_; }
    VaultState& vault_mut() { return vault_; } // snapshot restore / test forging
    BlockNumber current_block() const { return block_; }
    const std::map<Address, Amount>& balances() const { return balances_; }
    const std::vector<Record>& trace() const { return trace_; }

    // Each submission occupies the next block.
    Outcome submit(const Address& sender, const Action& action) {
        ++block_;
        Transition tr = vault_apply(vault_, block_, sender, action);
        if (tr.next) {
            vault_ = std::move(*tr.next);
            if (tr.outcome.effects.credit) {
                auto& [who, amount] = *tr.outcome.effects.credit;
                auto& bal = balances_[who];
                bal = U256::add_wrap(bal, amount);
            }
        }
        trace_.push_back(Record{block_, sender, action, tr.outcome});
        return tr.outcome;
    }

    // Let `n` blocks pass with no action. The gap shows up as a jump in the
    // block numbers of neighbouring trace records.
    Status advance(BlockNumber n) {
        if (n == 0)
            return {Error::invalid_config, "advance needs n >= 1"};
        block_ += n;
        return {};
    }

    Amount credited_total() const {
        Amount total;
        for (const auto& [addr, bal] : balances_)
            total = U256::add_wrap(total, bal);
        return total;
    }

    Amount deposited_total() const {
        Amount total;
        for (const Record& r : trace_) {
            if (r.outcome && r.outcome->applied) {
                if (const auto* d = std::get_if<act::Deposit>(&r.action))
                    total = U256::add_wrap(total, d->amount);
            }
        }
        return total;
    }

    // Restore support: used by snapshot loading.
    void restore_position(BlockNumber block, std::map<Address, Amount> balances,
                          std::vector<Record> trace) {
        block_ = block;
        balances_ = std::move(balances);
        trace_ = std::move(trace);
    }

private:
    VaultState vault_ = VaultState{};
    BlockNumber block_ = 0;
    std::map<Address, Amount> balances_;
    std::vector<Record> trace_;
};

// Drives a fresh chain through a recorded trace. Block gaps are reproduced
// from the record numbering; when a record carries an outcome, the replayed
// verdict must match it. The trace must start past the chain's current
// block.
inline Result<Chain> chain_replay(Chain chain, const std::vector<Record>& records) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Record& rec = records[i];
        if (rec.block <= chain.current_block())
            return {Error::parse_error,
                    "record " + std::to_string(i + 1) + ": block " +
                        std::to_string(rec.block) + " not after " +
                        std::to_string(chain.current_block())};
        BlockNumber gap = rec.block - chain.current_block() - 1;
        if (gap > 0)
            chain.advance(gap);
        Outcome got = chain.submit(rec.sender, rec.action);
        if (rec.outcome && !got.same_verdict(*rec.outcome)) {
            std::string want = rec.outcome->applied
                                   ? "applied"
                                   : std::string("rejected/") + error_name(rec.outcome->error);
            std::string have =
                got.applied ? "applied" : std::string("rejected/") + error_name(got.error);
            return {Error::replay_divergence, "record " + std::to_string(i + 1) + " (block " +
                                                  std::to_string(rec.block) + "): recorded " +
                                                  want + ", replayed " + have};
        }
    }
    return chain;
}

} // namespace phoenix
