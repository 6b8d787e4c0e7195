// Public goods game: settlement, per-mode feedback rendering, and
// investment-reply parsing.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arena/json_extract.hpp"
#include "arena/prompts.hpp"
#include "arena/util.hpp"

namespace arena {

enum class PggMode { IncomeFeedback, SortedInvestFeedback };

struct PggConfig {
    int n_participants = 4;
    double alpha = 1.2;
    int rounds = 5;
    double endowment_per_round = 10.0;
    PggMode mode = PggMode::IncomeFeedback;

    void validate() const {
        if (n_participants < 2) throw ConfigError("pgg: n_participants must be >= 2");
        if (alpha <= 0) throw ConfigError("pgg: alpha must be positive");
        if (rounds < 1) throw ConfigError("pgg: rounds must be >= 1");
        if (endowment_per_round <= 0) throw ConfigError("pgg: endowment must be positive");
    }
};

struct PggRoundState {
    int round = 0;
    std::map<std::string, double> investments;   // alias -> coins (post-clamp)
    double pool_total = 0.0;
    double share_per_agent = 0.0;
    std::map<std::string, double> balances;      // alias -> running balance
    std::vector<std::string> clamped;            // aliases whose invest was clamped
};

// Settles one round: pool = Σ invest, share = α·pool/N, each balance gains
// endowment − invest + share. Out-of-range investments clamp to the
// nearest legal value and the offender is recorded.
inline PggRoundState pgg_settle(const std::map<std::string, double>& investments,
                                const PggConfig& cfg,
                                const std::map<std::string, double>& balances, int round = 1) {
    if (static_cast<int>(investments.size()) != cfg.n_participants)
        throw ContractError("pgg_settle: investment count != n_participants");
    PggRoundState state;
    state.round = round;
    state.balances = balances;
    for (const auto& [alias, raw] : investments) {
        double invest = raw;
        if (invest < 0.0 || invest > cfg.endowment_per_round || !std::isfinite(invest)) {
            invest = std::isfinite(invest) ? std::clamp(invest, 0.0, cfg.endowment_per_round) : 0.0;
            state.clamped.push_back(alias);
        }
        state.investments[alias] = invest;
        state.pool_total += invest;
    }
    state.share_per_agent = cfg.alpha * state.pool_total / cfg.n_participants;
    for (const auto& [alias, invest] : state.investments)
        state.balances[alias] += cfg.endowment_per_round - invest + state.share_per_agent;
    return state;
}

inline std::string format_coins(double v) {
    // Integral amounts render bare, fractional ones with two decimals.
    if (std::abs(v - std::round(v)) < 1e-9) {
        std::ostringstream os;
        os << static_cast<long long>(std::llround(v));
        return os.str();
    }
    std::ostringstream os;
    os << v;  // default formatting: 1.2 stays "1.2", 8.57 stays "8.57"
    return os.str();
}

inline std::string pgg_sorted_invest_list(const PggRoundState& state) {
    std::vector<double> values;
    for (const auto& [alias, v] : state.investments) values.push_back(v);
    std::sort(values.rbegin(), values.rend());  // descending, as the rule text states
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_coins(values[i]);
    }
    return out + "]";
}

// Feedback for one receiver. Mode 1 reports only the receiver's own share;
// mode 2 reports the anonymized descending investment list. No amount is
// ever attached to an agent identity.
inline std::string pgg_feedback(const PggRoundState& state, const std::string& receiver,
                                PggMode mode) {
    (void)receiver;  // amounts are identity-free by design of the modes
    std::map<std::string, std::string> bindings{{"round", std::to_string(state.round + 1)}};
    if (mode == PggMode::IncomeFeedback) {
        bindings["income"] = format_coins(state.share_per_agent);
        return render_template(prompts::pgg_mode1_followup(), bindings);
    }
    bindings["sorted invest"] = pgg_sorted_invest_list(state);
    return render_template(prompts::pgg_mode2_followup(), bindings);
}

struct InvestReply {
    std::string reason;
    double coins = 0.0;
};

// Pulls {"reason":..., "coins":...} out of the reply, tolerating prose and
// code fences. nullopt = format violation (caller re-asks once, then
// treats as investment 0).
inline std::optional<InvestReply> parse_invest_reply(const std::string& reply) {
    auto obj = extract_json_object(reply);
    if (!obj || !obj->contains("coins")) return std::nullopt;
    const auto& coins = (*obj)["coins"];
    InvestReply out;
    if (coins.is_number()) {
        out.coins = coins.get<double>();
    } else if (coins.is_string()) {
        try {
            out.coins = std::stod(coins.get<std::string>());
        } catch (...) {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    if (obj->contains("reason") && (*obj)["reason"].is_string())
        out.reason = (*obj)["reason"].get<std::string>();
    return out;
}

}  // namespace arena
