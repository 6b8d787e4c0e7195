// Referee judgment duties: end detection and payoff extraction via a
// judge backend using the task scoring schemas.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/json_extract.hpp"
#include "arena/prompts.hpp"
#include "arena/util.hpp"

namespace arena {

enum class EndReason { TerminationToken, RuleViolation, MaxRounds, ConsensusJudged };

inline std::string to_string(EndReason r) {
    switch (r) {
        case EndReason::TerminationToken: return "termination_token";
        case EndReason::RuleViolation: return "rule_violation";
        case EndReason::MaxRounds: return "max_rounds";
        case EndReason::ConsensusJudged: return "consensus_judged";
    }
    return "?";
}

struct EndJudgment {
    bool ended = false;
    std::optional<EndReason> reason;

    static EndJudgment not_ended() { return {}; }
    static EndJudgment ended_for(EndReason r) { return {true, r}; }
};

struct RoleScore {
    std::string evaluation;
    double score = 0.0;
};

struct JudgeVerdict {
    std::map<std::string, RoleScore> roles;  // role name -> entry
    std::string raw_reply;
    bool parse_ok = false;
};

// Parses the judge reply schema {"<Role>":{"evaluation":..., "score":...}, ...}
// for exactly the demanded roles, scores in [1,10]. parse_ok=false on any
// violation; the raw reply is always retained.
inline JudgeVerdict parse_judge_reply(const std::string& reply,
                                      const std::vector<std::string>& required_roles) {
    JudgeVerdict verdict;
    verdict.raw_reply = reply;
    auto obj = extract_json_object(reply);
    if (!obj) return verdict;
    for (const auto& role : required_roles) {
        if (!obj->contains(role) || !(*obj)[role].is_object()) return verdict;
        const auto& entry = (*obj)[role];
        if (!entry.contains("score") || !entry["score"].is_number()) return verdict;
        double score = entry["score"].get<double>();
        if (score < 1.0 || score > 10.0) return verdict;
        RoleScore rs;
        rs.score = score;
        if (entry.contains("evaluation") && entry["evaluation"].is_string())
            rs.evaluation = entry["evaluation"].get<std::string>();
        verdict.roles[role] = rs;
    }
    verdict.parse_ok = true;
    return verdict;
}

// Issues the judge prompt for the rendered dialogue and parses the reply.
// On a malformed reply the judge is re-asked once with a format reminder;
// a second failure yields parse_ok=false (the run is then invalid).
inline JudgeVerdict score_dialogue(const std::string& dialogue, const PromptTemplate& judge_tpl,
                                   const std::vector<std::string>& required_roles,
                                   Backend& judge, const RetryBudget& budget = {},
                                   const std::function<void(const nlohmann::ordered_json&)>& log = {}) {
    std::string prompt = render_template(judge_tpl, {{"dialogue", dialogue}});
    std::vector<ChatTurn> turns{{ChatTurn::Speaker::Other, prompt}};
    std::string reply = query(judge, format_context(turns, BackendFlavor::Scripted, {}), budget, log);
    JudgeVerdict verdict = parse_judge_reply(reply, required_roles);
    if (verdict.parse_ok) return verdict;

    turns.push_back({ChatTurn::Speaker::SelfAgent, reply});
    turns.push_back({ChatTurn::Speaker::Other,
                     "Your previous reply did not follow the required json format or used an "
                     "out-of-range score. Reply again using exactly the required format, with "
                     "scores on a scale of 1-10."});
    reply = query(judge, format_context(turns, BackendFlavor::Scripted, {}), budget, log);
    return parse_judge_reply(reply, required_roles);
}

}  // namespace arena
