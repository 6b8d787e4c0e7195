// Per-run task engine: the bridge between the formal game model and the
// orchestrator loop. Engines own the task state machine; all mutation
// flows through the orchestrator's single-writer loop.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/game.hpp"
#include "arena/pool.hpp"
#include "arena/referee.hpp"

namespace arena {

class TaskEngine {
public:
    virtual ~TaskEngine() = default;

    virtual const GameDefinition& game() const = 0;

    // Participating aliases, in deterministic order.
    virtual std::vector<std::string> participants() const = 0;
    virtual int role_index(const std::string& alias) const = 0;  // 1-based
    virtual std::string role_name(const std::string& alias) const = 0;

    // Round-0 broadcast body for one agent.
    virtual std::string rule_text(const std::string& alias) const = 0;

    // Aliases that must send this round.
    virtual std::vector<std::string> senders(int round) const = 0;

    // Format policing. ok=false triggers a single re-ask carrying
    // `reminder`; if that also fails, `canonical` stands in for the reply.
    struct Check {
        bool ok = true;
        std::string reminder;
        std::string canonical;
    };
    virtual Check check_reply(const std::string& alias, int round,
                              const std::string& reply) const {
        (void)alias; (void)round; (void)reply;
        return {};
    }

    // Who may be shown a committed reply from `alias` (sender sees its own
    // messages implicitly).
    virtual std::set<std::string> reply_visibility(const std::string& alias) const = 0;

    // Applies a committed reply to task state.
    virtual void on_reply(const std::string& alias, int round, const std::string& reply) = 0;

    // Referee messages to append after the round's replies are committed.
    virtual std::vector<PoolMessage> round_feedback(int round) = 0;

    // Settlement record for the transcript, if the task produces one.
    virtual std::optional<nlohmann::ordered_json> settlement(int round) const {
        (void)round;
        return std::nullopt;
    }

    // Task-decidable end state after `rounds_done` committed rounds (the
    // round bound is enforced by the caller).
    virtual EndJudgment end_state(int rounds_done) const = 0;

    // Judge-scored tasks.
    virtual bool judge_scored() const { return false; }
    virtual const PromptTemplate* judge_template() const { return nullptr; }
    virtual std::vector<std::string> judge_roles() const { return {}; }
    virtual std::string dialogue_view() const { return {}; }
    virtual void set_verdict(const JudgeVerdict&) {}

    // Final payoffs; only meaningful once terminal.
    virtual std::vector<Payoff> payoffs() const = 0;
};

}  // namespace arena
