// Formal task model: participants, histories, terminality, turn ownership
// and payoffs, independent of any concrete task.
#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "arena/util.hpp"

namespace arena {

enum class TaskKind { Symmetric, Asymmetric };

// One step of play. `amount` carries numeric payloads (coin investments);
// `text` carries everything else (idiom, code, translation, judge note).
struct TaskAction {
    enum class Kind { Coins, Idiom, Code, Translation, Review, Text };
    Kind kind = Kind::Text;
    std::string text;
    double amount = 0.0;
};

struct ActionRecord {
    int round = 0;  // >= 1 for play actions
    std::string actor;
    TaskAction content;
};

struct HistorySequence {
    std::vector<ActionRecord> actions;
    bool terminal = false;

    bool empty() const { return actions.empty(); }
    // Rounds are non-decreasing; the last action's round is the count of
    // rounds touched so far.
    int rounds_completed() const { return actions.empty() ? 0 : actions.back().round; }

    HistorySequence prefix(std::size_t length) const {
        HistorySequence p;
        p.actions.assign(actions.begin(), actions.begin() + static_cast<std::ptrdiff_t>(length));
        return p;
    }
};

struct Payoff {
    std::string agent;
    double value = 0.0;
};

struct RoleSpec {
    int role_index = 1;  // in [1, L]
    std::string name;
    std::function<bool(int)> sends_in_round;
    std::function<bool(int)> receives_in_round;
};

struct GameDefinition {
    std::string task_id;
    TaskKind kind = TaskKind::Symmetric;
    std::vector<RoleSpec> roles;
    std::string rule_text;
    int max_rounds = 1;
    std::function<bool(const HistorySequence&)> terminal_predicate;
    std::function<std::vector<Payoff>(const HistorySequence&)> payoff_rule;

    void validate() const {
        if (max_rounds < 1) throw ContractError("GameDefinition: max_rounds must be >= 1");
        if (roles.empty()) throw ContractError("GameDefinition: at least one role required");
        if (kind == TaskKind::Symmetric && roles.size() != 1)
            throw ContractError("GameDefinition: symmetric tasks have exactly one role");
    }
};

inline void validate_history(const HistorySequence& h) {
    int prev = 0;
    for (const auto& a : h.actions) {
        if (a.round < 1) throw HistoryError("history: action round must be >= 1");
        if (a.round < prev) throw HistoryError("history: round ordering violated");
        prev = a.round;
    }
}

// True iff the task-supplied end test accepts h or the round bound is spent.
// Pure in its inputs.
inline bool is_terminal(const HistorySequence& h, const GameDefinition& g) {
    validate_history(h);
    if (h.empty()) return false;  // the root is never terminal
    if (g.terminal_predicate && g.terminal_predicate(h)) return true;
    return h.rounds_completed() >= g.max_rounds;
}

// Roles that must produce a message this round.
inline std::set<int> next_senders(int round, const GameDefinition& g) {
    if (round < 1 || round > g.max_rounds) throw RangeError("next_senders: round out of range");
    std::set<int> out;
    for (const auto& role : g.roles)
        if (!role.sends_in_round || role.sends_in_round(round)) out.insert(role.role_index);
    return out;
}

// Delegates to the task's payoff rule; only defined on terminal histories.
inline std::vector<Payoff> compute_payoffs(const HistorySequence& z, const GameDefinition& g) {
    if (!is_terminal(z, g)) throw ContractError("compute_payoffs: history is not terminal");
    if (!g.payoff_rule) throw ContractError("compute_payoffs: no payoff rule bound");
    return g.payoff_rule(z);
}

}  // namespace arena
