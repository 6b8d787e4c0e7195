// Match planning: repeats for roster tasks, ordered pairs with role swap
// for pairwise tasks. Deterministic given config + seed.
#pragma once

#include <string>
#include <vector>

#include "arena/config.hpp"
#include "arena/tasks/idiom.hpp"
#include "arena/util.hpp"

namespace arena {

struct Match {
    int index = 0;                       // position in the plan (run id suffix)
    int repeat = 0;                      // repeat counter within its pairing
    std::vector<std::size_t> seats;      // backend indices; seats[0] = role 1
    std::uint64_t seed = 0;              // per-run seed derivation
    std::string item_id;                 // opening idiom / problem id / segment id
    std::string item_text;               // opening idiom / problem text / segment text
};

struct MatchPlan {
    TaskSelection task = TaskSelection::PggMode1;
    std::vector<Match> matches;
};

inline MatchPlan plan_matches(const EvaluationConfig& cfg) {
    MatchPlan plan;
    plan.task = cfg.task;
    const std::size_t n = cfg.backends.size();
    int index = 0;

    if (!is_pairwise(cfg.task)) {
        // Full roster, one run per repeat.
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        for (int r = 0; r < cfg.repeats; ++r)
            plan.matches.push_back({index++, r, all, derive_seed(cfg.seed, r + 1), "", ""});
        return plan;
    }

    if (n < 2) throw ConfigError("plan_matches: pairwise task needs at least 2 backends");

    // Items drive the repeats of judge-scored tasks; idiom samples one
    // opening per repeat from the dictionary.
    std::vector<WorkItem> items;
    if (cfg.task == TaskSelection::Idiom) {
        auto dict = load_idiom_dictionary(cfg.dictionary_path);
        std::vector<std::string> all(dict.all().begin(), dict.all().end());
        SplitMix64 gen(derive_seed(cfg.seed, 0xd1c7));
        for (int r = 0; r < cfg.repeats; ++r) {
            const auto& opening = all[gen.below(all.size())];
            items.push_back({opening, opening});
        }
    } else {
        auto loaded = load_work_items(cfg.items_path);
        for (int r = 0; r < cfg.repeats; ++r)
            for (const auto& item : loaded) items.push_back(item);
    }

    // Every ordered pair appears with each role arrangement (role swap).
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            int repeat = 0;
            for (const auto& item : items) {
                plan.matches.push_back({index, repeat++, {a, b},
                                        derive_seed(cfg.seed, 0x9000 + index), item.id,
                                        item.text});
                ++index;
            }
        }
    return plan;
}

inline nlohmann::ordered_json plan_to_json(const MatchPlan& plan) {
    nlohmann::ordered_json out;
    out["task"] = to_string(plan.task);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : plan.matches) {
        nlohmann::ordered_json jm;
        jm["index"] = m.index;
        jm["repeat"] = m.repeat;
        jm["seats"] = m.seats;
        jm["seed"] = m.seed;
        jm["item_id"] = m.item_id;
        arr.push_back(jm);
    }
    out["matches"] = arr;
    return out;
}

}  // namespace arena
