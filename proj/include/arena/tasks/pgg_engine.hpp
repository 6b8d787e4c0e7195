// Public goods game engine: simultaneous-move rounds, settlement after the
// barrier, per-mode anonymized feedback.
#pragma once

#include <sstream>

#include "arena/tasks/engine.hpp"
#include "arena/tasks/pgg.hpp"

namespace arena {

class PggEngine : public TaskEngine {
public:
    PggEngine(PggConfig cfg, std::vector<std::string> aliases)
        : cfg_(cfg), aliases_(std::move(aliases)) {
        cfg_.validate();
        if (static_cast<int>(aliases_.size()) != cfg_.n_participants)
            throw ConfigError("pgg: participant count != n_participants");
        for (const auto& a : aliases_) balances_[a] = 0.0;

        game_.task_id = cfg_.mode == PggMode::IncomeFeedback ? "pgg_mode1" : "pgg_mode2";
        game_.kind = TaskKind::Symmetric;
        game_.max_rounds = cfg_.rounds;
        game_.roles = {{1, "participant", [](int) { return true; }, [](int) { return true; }}};
        game_.rule_text = rule_body();
        // Terminality is purely the round bound; payoffs replay settlement
        // over the recorded investments.
        game_.terminal_predicate = nullptr;
        PggConfig cfg_copy = cfg_;
        std::vector<std::string> alias_copy = aliases_;
        game_.payoff_rule = [cfg_copy, alias_copy](const HistorySequence& z) {
            std::map<std::string, double> balances;
            for (const auto& a : alias_copy) balances[a] = 0.0;
            std::map<std::string, double> invests;
            int round = 0;
            for (const auto& action : z.actions) {
                if (action.round != round) {
                    round = action.round;
                    invests.clear();
                }
                invests[action.actor] = action.content.amount;
                if (static_cast<int>(invests.size()) == cfg_copy.n_participants)
                    balances = pgg_settle(invests, cfg_copy, balances, round).balances;
            }
            std::vector<Payoff> out;
            for (const auto& a : alias_copy) out.push_back({a, balances.at(a)});
            return out;
        };
        game_.validate();
    }

    const GameDefinition& game() const override { return game_; }
    std::vector<std::string> participants() const override { return aliases_; }
    int role_index(const std::string&) const override { return 1; }
    std::string role_name(const std::string&) const override { return "participant"; }

    std::string rule_text(const std::string&) const override {
        return game_.rule_text + "\n" + prompts::pgg_format_instruction().text;
    }

    std::vector<std::string> senders(int) const override { return aliases_; }

    Check check_reply(const std::string&, int, const std::string& reply) const override {
        if (parse_invest_reply(reply)) return {};
        return {false, prompts::pgg_format_instruction().text,
                "{\"reason\":\"format violation, treated as no investment\", \"coins\":0}"};
    }

    std::set<std::string> reply_visibility(const std::string& alias) const override {
        return {alias};  // investments are never shown to peers
    }

    void on_reply(const std::string& alias, int round, const std::string& reply) override {
        auto parsed = parse_invest_reply(reply);
        double coins = parsed ? parsed->coins : 0.0;
        pending_[alias] = coins;
        history_.actions.push_back({round, alias, {TaskAction::Kind::Coins, reply, coins}});
    }

    std::vector<PoolMessage> round_feedback(int round) override {
        last_state_ = pgg_settle(pending_, cfg_, balances_, round);
        balances_ = last_state_.balances;
        pending_.clear();

        std::vector<PoolMessage> out;
        if (round >= cfg_.rounds) return out;  // no further decisions to inform
        if (cfg_.mode == PggMode::IncomeFeedback) {
            for (const auto& alias : aliases_)
                out.push_back({round, kRefereeAlias,
                               pgg_feedback(last_state_, alias, cfg_.mode),
                               {alias}});
        } else {
            std::set<std::string> everyone(aliases_.begin(), aliases_.end());
            out.push_back({round, kRefereeAlias,
                           pgg_feedback(last_state_, aliases_.front(), cfg_.mode), everyone});
        }
        return out;
    }

    std::optional<nlohmann::ordered_json> settlement(int round) const override {
        if (last_state_.round != round) return std::nullopt;
        nlohmann::ordered_json rec;
        rec["pool_total"] = last_state_.pool_total;
        rec["share_per_agent"] = last_state_.share_per_agent;
        nlohmann::ordered_json inv;
        for (const auto& [alias, v] : last_state_.investments) inv[alias] = v;
        rec["investments"] = inv;
        nlohmann::ordered_json bal;
        for (const auto& [alias, v] : last_state_.balances) bal[alias] = v;
        rec["balances"] = bal;
        if (!last_state_.clamped.empty()) rec["clamped"] = last_state_.clamped;
        return rec;
    }

    EndJudgment end_state(int) const override { return EndJudgment::not_ended(); }

    std::vector<Payoff> payoffs() const override {
        HistorySequence terminal = history_;
        return compute_payoffs(terminal, game_);
    }

    const std::map<std::string, double>& balances() const { return balances_; }
    const HistorySequence& history() const { return history_; }

private:
    std::string rule_body() const {
        std::map<std::string, std::string> bindings{
            {"n", std::to_string(cfg_.n_participants)},
            {"rounds", std::to_string(cfg_.rounds)},
            {"α", format_coins(cfg_.alpha)}};
        return render_template(cfg_.mode == PggMode::IncomeFeedback ? prompts::pgg_mode1_initial()
                                                                    : prompts::pgg_mode2_initial(),
                               bindings);
    }

    PggConfig cfg_;
    std::vector<std::string> aliases_;
    GameDefinition game_;
    std::map<std::string, double> balances_;
    std::map<std::string, double> pending_;
    PggRoundState last_state_;
    HistorySequence history_;
};

}  // namespace arena
