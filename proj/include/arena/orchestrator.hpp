// The run loop: broadcasts the rule, enforces the per-round send barrier,
// appends to the message pool, detects task end, and extracts payoffs.
// Sender queries within a round run concurrently; commits happen in a
// single deterministic batch once the barrier is full.
#pragma once

#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/pool.hpp"
#include "arena/referee.hpp"
#include "arena/tasks/engine.hpp"
#include "arena/transcript.hpp"

namespace arena {

struct RoundOutcome {
    bool ended = false;
    EndJudgment judgment;
};

struct RunResult {
    bool valid = true;
    std::string abort_reason;
    std::optional<EndReason> end_reason;
    int rounds = 0;
    std::map<std::string, double> payoffs;  // alias -> value
    JudgeVerdict verdict;
    bool judged = false;
};

namespace detail {

inline const AgentHandle& handle_for(const std::vector<AgentHandle>& agents,
                                     const std::string& alias) {
    for (const auto& h : agents)
        if (h.alias == alias) return h;
    throw ContractError("no agent registered for alias '" + alias + "'");
}

// One attempt record kept per sender so transcript order stays
// deterministic regardless of query interleaving.
struct SenderExchange {
    std::vector<nlohmann::ordered_json> attempts;
    std::string reply;
    bool failed = false;
    std::string error;
};

}  // namespace detail

// Round-0 rule broadcast: one message per agent.
inline void broadcast_rule(TaskEngine& task, MessagePool& pool,
                           const std::vector<AgentHandle>& agents, Transcript& transcript) {
    if (agents.empty()) throw ContractError("broadcast_rule: no participants");
    if (!pool.empty()) throw ContractError("broadcast_rule: pool not empty for this run");
    for (const auto& agent : agents) {
        std::string body = task.rule_text(agent.alias);
        pool.append({0, kRefereeAlias, body, {agent.alias}});
        transcript.emit("rule_broadcast", 0, {{"to", agent.alias}, {"body", body}});
    }
}

// End judgment combining the task-decidable end state with the round bound.
inline EndJudgment judge_end(const TaskEngine& task, int rounds_done) {
    EndJudgment j = task.end_state(rounds_done);
    if (j.ended) return j;
    if (rounds_done >= task.game().max_rounds) return EndJudgment::ended_for(EndReason::MaxRounds);
    return EndJudgment::not_ended();
}

// Runs one synchronous round. Throws RunAborted when a backend exhausts
// its retry budget.
inline RoundOutcome run_round(int round, TaskEngine& task, MessagePool& pool,
                              const std::vector<AgentHandle>& agents, Transcript& transcript,
                              const RetryBudget& budget = {}) {
    const auto senders = task.senders(round);
    if (senders.empty()) throw ContractError("run_round: no senders for round");

    // (a) query every sender with its visible context, concurrently.
    auto ask_one = [&](const std::string& alias) {
        detail::SenderExchange ex;
        const AgentHandle& agent = detail::handle_for(agents, alias);
        auto visible = select_visible(pool, alias, round);
        std::vector<ChatTurn> turns;
        for (const auto& msg : visible)
            turns.push_back({msg.sender == alias ? ChatTurn::Speaker::SelfAgent
                                                 : ChatTurn::Speaker::Other,
                             msg.body});
        auto log = [&ex](const nlohmann::ordered_json& rec) { ex.attempts.push_back(rec); };
        try {
            ex.reply = query(*agent.backend, format_context(turns, agent.ref.flavor, agent.ref.params),
                             budget, log);
            auto check = task.check_reply(alias, round, ex.reply);
            if (!check.ok) {
                // One re-ask with the format reminder, then the canonical
                // fallback stands in.
                turns.push_back({ChatTurn::Speaker::SelfAgent, ex.reply});
                turns.push_back({ChatTurn::Speaker::Other, check.reminder});
                ex.reply = query(*agent.backend,
                                 format_context(turns, agent.ref.flavor, agent.ref.params), budget, log);
                if (!task.check_reply(alias, round, ex.reply).ok) ex.reply = check.canonical;
            }
        } catch (const BackendError& e) {
            ex.failed = true;
            ex.error = e.what();
        }
        return ex;
    };

    std::vector<std::future<detail::SenderExchange>> futures;
    futures.reserve(senders.size());
    for (const auto& alias : senders)
        futures.push_back(std::async(std::launch::async, ask_one, alias));

    std::vector<detail::SenderExchange> exchanges;
    exchanges.reserve(senders.size());
    for (auto& f : futures) exchanges.push_back(f.get());

    // (b)+(c) the barrier is full: commit in deterministic sender order.
    for (std::size_t i = 0; i < senders.size(); ++i) {
        for (const auto& attempt : exchanges[i].attempts)
            transcript.emit("agent_request", round,
                            {{"agent", senders[i]},
                             {"attempt", attempt.value("attempt", 0)},
                             {"payload", attempt.value("payload", "")},
                             {"reply", attempt.value("reply", "")},
                             {"error", attempt.value("error", "")}});
        if (exchanges[i].failed) {
            transcript.emit("abort", round,
                            {{"reason", "backend_failure"},
                             {"agent", senders[i]},
                             {"detail", exchanges[i].error}});
            throw RunAborted("backend failure for " + senders[i] + ": " + exchanges[i].error);
        }
    }
    for (std::size_t i = 0; i < senders.size(); ++i) {
        auto visibility = task.reply_visibility(senders[i]);
        pool.append({round, senders[i], exchanges[i].reply, visibility});
        std::vector<std::string> vis(visibility.begin(), visibility.end());
        transcript.emit("agent_message", round,
                        {{"sender", senders[i]}, {"body", exchanges[i].reply}, {"visibility", vis}});
        task.on_reply(senders[i], round, exchanges[i].reply);
    }

    // (d) referee-selected deliveries for the next round.
    for (auto& msg : task.round_feedback(round)) {
        std::vector<std::string> vis(msg.visibility.begin(), msg.visibility.end());
        transcript.emit("referee_feedback", round, {{"body", msg.body}, {"visibility", vis}});
        pool.append(std::move(msg));
    }
    if (auto settlement = task.settlement(round))
        transcript.emit("settlement", round, *settlement);

    // (e) end judgment.
    RoundOutcome outcome;
    outcome.judgment = judge_end(task, round);
    outcome.ended = outcome.judgment.ended;
    return outcome;
}

// Full Algorithm-style run: broadcast, synchronous rounds until end, then
// payoff extraction (via the judge backend for judge-scored tasks).
inline RunResult run_task(TaskEngine& task, MessagePool& pool,
                          const std::vector<AgentHandle>& agents, Transcript& transcript,
                          Backend* judge = nullptr, const RetryBudget& budget = {}) {
    RunResult result;
    try {
        broadcast_rule(task, pool, agents, transcript);
        for (int round = 1; round <= task.game().max_rounds; ++round) {
            result.rounds = round;
            RoundOutcome outcome = run_round(round, task, pool, agents, transcript, budget);
            if (outcome.ended) {
                result.end_reason = outcome.judgment.reason;
                break;
            }
        }
        if (!result.end_reason) result.end_reason = EndReason::MaxRounds;
        transcript.emit("end", result.rounds, {{"reason", to_string(*result.end_reason)}});

        if (task.judge_scored()) {
            if (!judge) throw ConfigError("judge backend required for task " + task.game().task_id);
            result.verdict = score_dialogue(task.dialogue_view(), *task.judge_template(),
                                            task.judge_roles(), *judge, budget);
            result.judged = true;
            nlohmann::ordered_json v;
            for (const auto& [role, entry] : result.verdict.roles)
                v[role] = {{"evaluation", entry.evaluation}, {"score", entry.score}};
            transcript.emit("judge_verdict", result.rounds,
                            {{"parse_ok", result.verdict.parse_ok},
                             {"roles", v},
                             {"raw_reply", result.verdict.raw_reply}});
            if (!result.verdict.parse_ok) {
                result.valid = false;
                result.abort_reason = "judge_parse_failure";
                transcript.emit("abort", result.rounds, {{"reason", result.abort_reason}});
                return result;
            }
            task.set_verdict(result.verdict);
        }

        nlohmann::ordered_json payoff_rec;
        for (const auto& p : task.payoffs()) {
            result.payoffs[p.agent] = p.value;
            payoff_rec[p.agent] = p.value;
        }
        transcript.emit("payoffs", result.rounds, {{"values", payoff_rec}});
    } catch (const RunAborted& e) {
        result.valid = false;
        result.abort_reason = e.what();
    }
    return result;
}

}  // namespace arena
