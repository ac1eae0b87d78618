// Command line front end over the vault model: construct chains, apply
// actions, replay and property-check traces, run the bounded explorer, and
// execute the canned attack/recovery scenarios.
//
// Exit codes: 0 clean, 1 property violations / scenario failures / replay
// divergence / exhausted search budget, 2 usage or parse problems, 3 I/O.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phoenix/chain.hpp"
#include "phoenix/explore.hpp"
#include "phoenix/scenarios.hpp"
#include "phoenix/snapshot.hpp"

using namespace phoenix;

namespace {

enum ExitCode { exit_ok = 0, exit_findings = 1, exit_usage = 2, exit_io = 3 };

enum class Format { text, structured };

struct Global {
    ArithmeticMode mode = ArithmeticMode::fixed;
    Format format = Format::text;
    std::uint64_t seed = 0; // parsed for interface stability; nothing random yet
};

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return exit_usage;
}

int fail_io(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return exit_io;
}

Result<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return {Error::parse_error, "cannot open " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        return {Error::parse_error, "cannot read " + path};
    return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        return false;
    out << content;
    out.flush();
    return out.good();
}

// Text rendering of an action with its arguments.
std::string describe_action(const Action& a) {
    struct V {
        std::string operator()(const act::Deposit& x) {
            return "deposit(" + x.amount.to_decimal() + ")";
        }
        std::string operator()(const act::Request& x) {
            return "request(" + x.amount.to_decimal() + " -> " + x.recipient.to_string() +
                   ")";
        }
        std::string operator()(const act::Withdraw& x) {
            return "withdraw(#" + x.id.to_decimal() + ")";
        }
        std::string operator()(const act::CancelRequest& x) {
            return "cancel_request(#" + x.id.to_decimal() + ")";
        }
        std::string operator()(const act::CancelAllRequests&) {
            return "cancel_all_requests";
        }
        std::string operator()(const act::CancelSelfRequest& x) {
            return "cancel_self_request(#" + x.id.to_decimal() + ")";
        }
        std::string operator()(const act::Lock& x) {
            return "lock(until " + std::to_string(x.new_unlock) + ")";
        }
        std::string operator()(const act::AddT1& x) {
            return "add_t1(" + x.address.to_string() + ")";
        }
        std::string operator()(const act::AddT2& x) {
            return "add_t2(" + x.address.to_string() + ")";
        }
        std::string operator()(const act::RemoveT2& x) {
            return "remove_t2(" + x.address.to_string() + ")";
        }
        std::string operator()(const act::Destroy& x) {
            return "destroy(-> " + x.beneficiary.to_string() + ")";
        }
    };
    return std::visit(V{}, a);
}

std::string describe_outcome(const Outcome& o) {
    if (o.applied)
        return "applied";
    return std::string("rejected (") + error_name(o.error) + ")";
}

std::string describe_record(const Record& r) {
    std::string line = "block " + std::to_string(r.block) + ": " +
                       describe_action(r.action) + " by " + r.sender.to_string();
    if (r.outcome)
        line += " -> " + describe_outcome(*r.outcome);
    return line;
}

const char* property_label(PropertyId p) {
    for (const PropertyInfo& info : all_properties())
        if (info.id == p)
            return info.label;
    return "?";
}

void print_violation(const Violation& v, Format format) {
    if (format == Format::structured) {
        json witness = json::array();
        for (const Record& r : v.witness)
            witness.push_back(record_to_json(r));
        json j{{"property", v.prop.to_string()},
               {"label", property_label(v.prop)},
               {"witness", std::move(witness)}};
        if (!v.note.empty())
            j["note"] = v.note;
        std::cout << j.dump() << "\n";
        return;
    }
    std::cout << "violation " << v.prop.to_string() << ": " << property_label(v.prop);
    if (!v.note.empty())
        std::cout << " (" << v.note << ")";
    std::cout << "\n";
    for (const Record& r : v.witness)
        std::cout << "  " << describe_record(r) << "\n";
}

// Loads a snapshot; distinguishes missing/unreadable files (I/O) from
// malformed content (usage) via the returned exit code on failure.
int load_chain(const std::string& path, Chain& out) {
    auto text = read_file(path);
    if (!text)
        return fail_io(text.detail());
    auto chain = chain_from_string(text.value());
    if (!chain)
        return fail_usage(path + ": " + chain.detail());
    out = std::move(chain.value());
    return exit_ok;
}

int save_chain(const std::string& path, const Chain& c) {
    if (!write_file(path, snapshot_to_string(c)))
        return fail_io("cannot write " + path);
    return exit_ok;
}

int cmd_init(const Global& g, BlockNumber delay, const std::string& t1,
             const std::string& creator, std::size_t max_requests,
             const std::string& out_path) {
    auto t1_addr = Address::parse(t1);
    if (!t1_addr)
        return fail_usage("bad --t1 address: " + t1);
    auto creator_addr = Address::parse(creator);
    if (!creator_addr)
        return fail_usage("bad --creator address: " + creator);

    ChainConfig cfg;
    cfg.delay = delay;
    cfg.t1_addr = *t1_addr;
    cfg.creator = *creator_addr;
    cfg.max_requests = max_requests;
    cfg.mode = g.mode;
    auto chain = Chain::create(cfg);
    if (!chain)
        return fail_usage(chain.detail());

    if (int rc = save_chain(out_path, chain.value()); rc != exit_ok)
        return rc;
    if (g.format == Format::structured) {
        std::cout << snapshot_to_string(chain.value());
    } else {
        std::cout << "initialized " << mode_name(g.mode) << "-mode vault: delay " << delay
                  << ", tier-1 " << t1_addr->to_string() << ", tier-2 "
                  << creator_addr->to_string() << ", request cap " << max_requests
                  << "\nstate written to " << out_path << "\n";
    }
    return exit_ok;
}

int cmd_apply(const Global& g, const std::string& state_path, const std::string& sender,
              const std::string& action_text) {
    Chain chain;
    if (int rc = load_chain(state_path, chain); rc != exit_ok)
        return rc;
    auto sender_addr = Address::parse(sender);
    if (!sender_addr)
        return fail_usage("bad --sender address: " + sender);
    json aj = json::parse(action_text, nullptr, /*allow_exceptions=*/false);
    if (aj.is_discarded())
        return fail_usage("--action is not valid JSON");
    auto action = action_from_json(aj);
    if (!action)
        return fail_usage("--action: " + action.detail());

    chain.submit(*sender_addr, action.value());
    const Record& rec = chain.trace().back();
    if (g.format == Format::structured)
        std::cout << record_to_json(rec).dump() << "\n";
    else
        std::cout << describe_record(rec) << "\n";
    return save_chain(state_path, chain);
}

int cmd_run(const Global& g, const std::string& state_path, const std::string& trace_path) {
    Chain chain;
    if (int rc = load_chain(state_path, chain); rc != exit_ok)
        return rc;
    auto text = read_file(trace_path);
    if (!text)
        return fail_io(text.detail());
    std::istringstream in(text.value());
    auto records = parse_trace(in);
    if (!records)
        return fail_usage(trace_path + ": " + records.detail());

    std::size_t already = chain.trace().size();
    auto replayed = chain_replay(std::move(chain), records.value());
    if (!replayed) {
        if (replayed.error() == Error::replay_divergence) {
            std::cerr << "replay divergence: " << replayed.detail() << "\n";
            return exit_findings;
        }
        return fail_usage(replayed.detail());
    }
    const Chain& done = replayed.value();
    for (std::size_t i = already; i < done.trace().size(); ++i) {
        const Record& rec = done.trace()[i];
        if (g.format == Format::structured)
            std::cout << record_to_json(rec).dump() << "\n";
        else
            std::cout << describe_record(rec) << "\n";
    }
    if (g.format == Format::text)
        std::cout << "replayed " << (done.trace().size() - already) << " records, now at block "
                  << done.current_block() << "\n";
    return save_chain(state_path, done);
}

int cmd_check(const Global& g, const std::string& config_path,
              const std::string& trace_path) {
    Chain start;
    if (int rc = load_chain(config_path, start); rc != exit_ok)
        return rc;
    auto text = read_file(trace_path);
    if (!text)
        return fail_io(text.detail());
    std::istringstream in(text.value());
    auto records = parse_trace(in);
    if (!records)
        return fail_usage(trace_path + ": " + records.detail());

    auto checked = check_trace(start, records.value());
    if (!checked) {
        if (checked.error() == Error::replay_divergence) {
            std::cerr << "trace is inconsistent: " << checked.detail() << "\n";
            return exit_findings;
        }
        return fail_usage(checked.detail());
    }
    const TraceCheck& tc = checked.value();
    for (const Violation& v : tc.violations)
        print_violation(v, g.format);
    if (g.format == Format::structured) {
        json j{{"checked", std::to_string(tc.steps)},
               {"violations", std::to_string(tc.violations.size())}};
        std::cout << j.dump() << "\n";
    } else if (tc.violations.empty()) {
        std::cout << "no violations across " << tc.steps << " recorded actions\n";
    } else {
        std::cout << tc.violations.size() << " violation(s) across " << tc.steps
                  << " recorded actions\n";
    }
    return tc.violations.empty() ? exit_ok : exit_findings;
}

int cmd_explore(const Global& g, const ExploreConfig& cfg) {
    auto run = explore(cfg);
    if (!run)
        return fail_usage(run.detail());
    const ExploreReport& r = run.value();

    for (const Violation& v : r.violations)
        print_violation(v, g.format);
    if (g.format == Format::structured) {
        json j{{"states", std::to_string(r.states)},
               {"transitions", std::to_string(r.transitions)},
               {"budget_exceeded", r.budget_exceeded},
               {"violations", std::to_string(r.violations.size())}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "explored " << r.states << " states over " << r.transitions
                  << " transitions (depth " << cfg.max_depth << ", "
                  << mode_name(cfg.mode) << " mode)\n";
        if (r.budget_exceeded)
            std::cout << "state budget of " << cfg.max_states
                      << " exceeded: exploration is incomplete\n";
        if (r.violations.empty() && !r.budget_exceeded)
            std::cout << all_properties().size() << "/" << all_properties().size()
                      << " properties hold\n";
    }
    return (r.violations.empty() && !r.budget_exceeded) ? exit_ok : exit_findings;
}

int parse_scenario_params(const std::string& text, ScenarioParams& p) {
    if (text.empty())
        return exit_ok;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            return fail_usage("--param items must look like KEY=VALUE, got '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (key == "K" || key == "k" || key == "L" || key == "l" || key == "funds") {
            auto amount = U256::from_decimal(value);
            if (!amount)
                return fail_usage("--param " + key + ": bad amount '" + value + "'");
            if (key == "K" || key == "k")
                p.k = *amount;
            else if (key == "L" || key == "l")
                p.l = *amount;
            else
                p.initial_funds = *amount;
        } else if (key == "n" || key == "delay") {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size())
                return fail_usage("--param " + key + ": bad number '" + value + "'");
            if (key == "n")
                p.n = static_cast<unsigned>(v);
            else
                p.delay = v;
        } else {
            return fail_usage("--param: unknown key '" + key + "'");
        }
    }
    return exit_ok;
}

int cmd_scenario(const Global& g, const std::string& name, const std::string& param_text,
                 const std::string& trace_out) {
    ScenarioParams p;
    if (int rc = parse_scenario_params(param_text, p); rc != exit_ok)
        return rc;

    Result<ScenarioResult> run{Error::invalid_config, "unknown scenario"};
    if (name == "dos")
        run = run_dos(g.mode, p);
    else if (name == "delay-evasion")
        run = run_delay_evasion(g.mode, p);
    else if (name == "type2-recovery")
        run = run_type2_recovery(g.mode);
    else if (name == "type1-lockdown")
        run = run_type1_lockdown(g.mode);
    else
        return fail_usage("unknown scenario '" + name + "'");
    if (!run)
        return fail_usage(run.detail());
    const ScenarioResult& r = run.value();

    if (g.format == Format::structured) {
        for (const Stage& s : r.stages) {
            json j{{"stage", s.label},
                   {"funds", s.funds.to_decimal()},
                   {"pending_sum", s.sum.to_decimal()},
                   {"note", s.note}};
            std::cout << j.dump() << "\n";
        }
        for (const std::string& f : r.failures)
            std::cout << json{{"unmet", f}}.dump() << "\n";
        for (const Violation& v : r.violations)
            print_violation(v, g.format);
        json j{{"scenario", r.name},
               {"mode", mode_name(r.mode)},
               {"passed", r.passed},
               {"actions", std::to_string(r.trace.size())}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "scenario " << r.name << ", " << mode_name(r.mode) << " arithmetic\n";
        for (const Stage& s : r.stages)
            std::cout << "  " << s.label << ": funds=" << s.funds.to_decimal()
                      << " pending-sum=" << s.sum.to_decimal() << "  (" << s.note << ")\n";
        for (const std::string& f : r.failures)
            std::cout << "  unmet: " << f << "\n";
        for (const Violation& v : r.violations)
            std::cout << "  trace violates " << v.prop.to_string() << ": "
                      << property_label(v.prop) << "\n";
        std::cout << (r.passed ? "PASS" : "FAIL") << "\n";
    }

    if (!trace_out.empty()) {
        if (!write_file(trace_out, trace_to_string(r.trace)))
            return fail_io("cannot write " + trace_out);
    }
    return r.passed ? exit_ok : exit_findings;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-locked vault model: simulate, replay, check, explore"};
    app.require_subcommand(1);
    // Accept global flags (--mode and friends) after the subcommand name too.
    app.fallthrough();

    Global g;
    std::string mode_name_arg = "fixed";
    std::string format_arg = "text";
    app.add_option("--mode", mode_name_arg, "arithmetic mode: legacy (wrapping) or fixed")
        ->check(CLI::IsMember({"legacy", "fixed"}));
    app.add_option("--format", format_arg, "output style: text or structured (JSON lines)")
        ->check(CLI::IsMember({"text", "structured"}));
    app.add_option("--seed", g.seed, "reserved for randomized trace generation");

    // init
    auto* init = app.add_subcommand("init", "create a vault and write its state snapshot");
    BlockNumber init_delay = 1;
    std::string init_t1, init_creator, init_out;
    std::size_t init_cap = 8;
    init->add_option("--delay", init_delay, "withdrawal delay in blocks");
    init->add_option("--t1", init_t1, "tier-1 address")->required();
    init->add_option("--creator", init_creator, "creating (tier-2) address")->required();
    init->add_option("--max-requests", init_cap, "pending request capacity");
    init->add_option("--out", init_out, "state snapshot path")->required();

    // apply
    auto* apply = app.add_subcommand("apply", "submit one action against a state snapshot");
    std::string apply_state, apply_sender, apply_action;
    apply->add_option("--state", apply_state, "state snapshot path")->required();
    apply->add_option("--sender", apply_sender, "sending address")->required();
    apply->add_option("--action", apply_action, "action as trace-format JSON")->required();

    // run
    auto* run = app.add_subcommand("run", "replay a trace file against a state snapshot");
    std::string run_state, run_trace;
    run->add_option("--state", run_state, "state snapshot path")->required();
    run->add_option("--trace", run_trace, "trace file (JSON lines)")->required();

    // check
    auto* check = app.add_subcommand("check", "property-check a trace from a starting state");
    std::string check_config, check_trace_path;
    check->add_option("--config", check_config, "starting state snapshot")->required();
    check->add_option("--trace", check_trace_path, "trace file (JSON lines)")->required();

    // explore
    auto* explore_cmd = app.add_subcommand("explore", "bounded exhaustive search for violations");
    ExploreConfig ecfg;
    std::string fault_arg = "none";
    std::string efunds_arg = "3";
    explore_cmd->add_option("--addresses", ecfg.addresses, "address universe size");
    explore_cmd->add_option("--amount-cap", ecfg.amount_cap, "small-amount ceiling");
    explore_cmd->add_option("--depth", ecfg.max_depth, "actions per sequence");
    explore_cmd->add_option("--delay", ecfg.delay, "vault withdrawal delay");
    explore_cmd->add_option("--max-ledger-size", ecfg.max_ledger_size,
                            "pending request capacity");
    explore_cmd->add_option("--max-states", ecfg.max_states, "state budget");
    explore_cmd->add_option("--initial-funds", efunds_arg, "pre-seeded vault balance");
    explore_cmd->add_option("--fault", fault_arg,
                            "explore a deliberately broken vault variant");

    // scenario
    auto* scenario = app.add_subcommand("scenario", "run a canned attack or recovery drill");
    std::string scenario_name, scenario_params, scenario_trace_out;
    scenario
        ->add_option("name", scenario_name,
                     "dos | delay-evasion | type2-recovery | type1-lockdown")
        ->required();
    scenario->add_option("--param", scenario_params,
                         "comma-separated overrides, e.g. K=2,L=2,n=3,funds=5,delay=2");
    scenario->add_option("--trace-out", scenario_trace_out, "write the scenario trace here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    g.mode = *mode_from_name(mode_name_arg);
    g.format = format_arg == "structured" ? Format::structured : Format::text;

    if (init->parsed())
        return cmd_init(g, init_delay, init_t1, init_creator, init_cap, init_out);
    if (apply->parsed())
        return cmd_apply(g, apply_state, apply_sender, apply_action);
    if (run->parsed())
        return cmd_run(g, run_state, run_trace);
    if (check->parsed())
        return cmd_check(g, check_config, check_trace_path);
    if (explore_cmd->parsed()) {
        ecfg.mode = g.mode;
        auto fault = fault_from_name(fault_arg);
        if (!fault)
            return fail_usage("unknown fault '" + fault_arg + "'");
        ecfg.fault = *fault;
        auto funds = U256::from_decimal(efunds_arg);
        if (!funds)
            return fail_usage("bad --initial-funds amount '" + efunds_arg + "'");
        ecfg.initial_funds = *funds;
        return cmd_explore(g, ecfg);
    }
    if (scenario->parsed())
        return cmd_scenario(g, scenario_name, scenario_params, scenario_trace_out);
    return fail_usage("no subcommand given");
}
