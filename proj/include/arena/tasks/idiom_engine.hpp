// Idiom solitaire engine: alternating Early/Late turns over a seeded
// chain; an invalid idiom ends the game in the opponent's favor.
#pragma once

#include "arena/tasks/engine.hpp"
#include "arena/tasks/idiom.hpp"

namespace arena {

class IdiomEngine : public TaskEngine {
public:
    // aliases[0] plays the early position, aliases[1] the late position.
    IdiomEngine(IdiomDictionary dict, std::string opening, std::vector<std::string> aliases,
                int max_rounds)
        : dict_(std::move(dict)), aliases_(std::move(aliases)) {
        if (aliases_.size() != 2) throw ConfigError("idiom: exactly two participants required");
        if (!dict_.contains(opening))
            throw ConfigError("idiom: opening idiom not in dictionary: " + opening);
        state_ = IdiomChainState::seeded(opening);

        game_.task_id = "idiom";
        game_.kind = TaskKind::Asymmetric;  // early/late positions are scored per role
        game_.max_rounds = max_rounds;
        game_.roles = {
            {1, "early", [](int r) { return r % 2 == 1; }, [](int r) { return r % 2 == 0; }},
            {2, "late", [](int r) { return r % 2 == 0; }, [](int r) { return r % 2 == 1; }}};
        game_.rule_text = idiom_render_context(state_);

        IdiomDictionary dict_copy = dict_;
        std::string opening_copy = state_.chain.front();
        std::vector<std::string> alias_copy = aliases_;
        game_.terminal_predicate = [dict_copy, opening_copy](const HistorySequence& h) {
            auto chain = IdiomChainState::seeded(opening_copy);
            for (const auto& action : h.actions) {
                if (idiom_validate(action.content.text, chain, dict_copy) != IdiomVerdict::Valid)
                    return true;  // the failing move ends the game
                chain.push(action.content.text);
            }
            return false;
        };
        // Win-by-opponent-failure; a bound-hit with both agents still valid
        // splits 0.5 / 0.5.
        game_.payoff_rule = [dict_copy, opening_copy, alias_copy](const HistorySequence& z) {
            auto chain = IdiomChainState::seeded(opening_copy);
            for (const auto& action : z.actions) {
                if (idiom_validate(action.content.text, chain, dict_copy) != IdiomVerdict::Valid) {
                    std::vector<Payoff> out;
                    for (const auto& a : alias_copy)
                        out.push_back({a, a == action.actor ? 0.0 : 1.0});
                    return out;
                }
                chain.push(action.content.text);
            }
            return std::vector<Payoff>{{alias_copy[0], 0.5}, {alias_copy[1], 0.5}};
        };
        game_.validate();
    }

    const GameDefinition& game() const override { return game_; }
    std::vector<std::string> participants() const override { return aliases_; }
    int role_index(const std::string& alias) const override { return alias == aliases_[0] ? 1 : 2; }
    std::string role_name(const std::string& alias) const override {
        return alias == aliases_[0] ? "early" : "late";
    }

    std::string rule_text(const std::string&) const override { return game_.rule_text; }

    std::vector<std::string> senders(int round) const override {
        return {round % 2 == 1 ? aliases_[0] : aliases_[1]};
    }

    std::set<std::string> reply_visibility(const std::string&) const override {
        return {aliases_[0], aliases_[1]};
    }

    void on_reply(const std::string& alias, int round, const std::string& reply) override {
        std::string candidate = trim(reply);
        last_verdict_ = idiom_validate(candidate, state_, dict_);
        history_.actions.push_back({round, alias, {TaskAction::Kind::Idiom, candidate, 0.0}});
        if (last_verdict_ == IdiomVerdict::Valid) {
            state_.push(candidate);
        } else {
            loser_ = alias;
        }
    }

    std::vector<PoolMessage> round_feedback(int round) override {
        if (loser_ || round >= game_.max_rounds) return {};
        std::string next = senders(round + 1).front();
        return {{round, kRefereeAlias, idiom_render_context(state_), {next}}};
    }

    EndJudgment end_state(int) const override {
        if (loser_) return EndJudgment::ended_for(EndReason::RuleViolation);
        return EndJudgment::not_ended();
    }

    std::vector<Payoff> payoffs() const override {
        HistorySequence terminal = history_;
        return compute_payoffs(terminal, game_);
    }

    const IdiomChainState& chain_state() const { return state_; }
    IdiomVerdict last_verdict() const { return last_verdict_; }

private:
    IdiomDictionary dict_;
    std::vector<std::string> aliases_;
    GameDefinition game_;
    IdiomChainState state_;
    HistorySequence history_;
    std::optional<std::string> loser_;
    IdiomVerdict last_verdict_ = IdiomVerdict::Valid;
};

}  // namespace arena
