// Evaluation configuration: task selection, participants, repeats, seeds.
// Validation reports every violation at once.
#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/tasks/pgg.hpp"
#include "arena/util.hpp"

namespace arena {

enum class TaskSelection { PggMode1, PggMode2, Idiom, CodeReview, MachineTranslation };

inline std::string to_string(TaskSelection t) {
    switch (t) {
        case TaskSelection::PggMode1: return "pgg_mode1";
        case TaskSelection::PggMode2: return "pgg_mode2";
        case TaskSelection::Idiom: return "idiom";
        case TaskSelection::CodeReview: return "code_review";
        case TaskSelection::MachineTranslation: return "machine_translation";
    }
    return "?";
}

inline TaskSelection task_selection_from(const std::string& s) {
    if (s == "pgg_mode1") return TaskSelection::PggMode1;
    if (s == "pgg_mode2") return TaskSelection::PggMode2;
    if (s == "idiom") return TaskSelection::Idiom;
    if (s == "code_review") return TaskSelection::CodeReview;
    if (s == "machine_translation") return TaskSelection::MachineTranslation;
    throw ConfigError("unknown task: " + s);
}

inline bool is_pairwise(TaskSelection t) { return t != TaskSelection::PggMode1 && t != TaskSelection::PggMode2; }
inline bool is_judge_scored(TaskSelection t) {
    return t == TaskSelection::CodeReview || t == TaskSelection::MachineTranslation;
}

// One problem / source segment for the writer-editor tasks.
struct WorkItem {
    std::string id;
    std::string text;
};

struct EvaluationConfig {
    TaskSelection task = TaskSelection::PggMode1;
    std::uint64_t seed = 0;
    int repeats = 1;
    std::string out_dir = "out";
    int parallelism = 0;          // 0 = min(4, plan size)
    double invalid_tolerance = 0.10;
    int max_rounds = 5;           // pgg rounds / idiom round bound
    int max_exchanges = 5;        // writer-editor bound

    // pgg
    PggConfig pgg;
    // idiom
    std::string dictionary_path;
    // code review / machine translation
    std::string items_path;       // line-delimited records: {"id":..., "text":...} or raw lines
    std::string source_lang = "German";
    std::string target_lang = "English";

    std::vector<BackendRef> backends;
    std::optional<BackendRef> judge;

    nlohmann::ordered_json raw;   // original document, persisted with artifacts
};

namespace detail {

inline BackendRef backend_from_json(const nlohmann::json& j) {
    BackendRef ref;
    ref.backend_id = j.value("id", "");
    ref.flavor = backend_flavor_from(j.value("flavor", "scripted"));
    if (j.contains("params"))
        for (const auto& [key, value] : j.at("params").items())
            ref.params[key] = value.is_string() ? value.get<std::string>() : value.dump();
    return ref;
}

}  // namespace detail

// Sets sensible language names from a preset pair code (the shipped
// presets are de-en, en-fr, en-zh).
inline std::pair<std::string, std::string> language_pair(const std::string& code) {
    if (code == "de-en") return {"German", "English"};
    if (code == "en-fr") return {"English", "French"};
    if (code == "en-zh") return {"English", "Chinese"};
    auto parts = split(code, "-");
    if (parts.size() == 2 && !parts[0].empty() && !parts[1].empty()) return {parts[0], parts[1]};
    throw ConfigError("unknown language pair: " + code);
}

inline EvaluationConfig parse_config(const nlohmann::ordered_json& doc) {
    std::vector<std::string> errors;
    EvaluationConfig cfg;
    cfg.raw = doc;

    try {
        cfg.task = task_selection_from(doc.value("task", ""));
    } catch (const ConfigError& e) {
        errors.push_back(e.what());
    }
    cfg.seed = doc.value("seed", 0ULL);
    cfg.repeats = doc.value("repeats", 1);
    if (cfg.repeats < 1) errors.push_back("repeats must be >= 1");
    cfg.out_dir = doc.value("out", "out");
    cfg.parallelism = doc.value("parallelism", 0);
    cfg.invalid_tolerance = doc.value("tolerance", 0.10);
    cfg.max_rounds = doc.value("max_rounds", 5);
    if (cfg.max_rounds < 1) errors.push_back("max_rounds must be >= 1");
    cfg.max_exchanges = doc.value("max_exchanges", 5);
    if (cfg.max_exchanges < 1) errors.push_back("max_exchanges must be >= 1");

    if (doc.contains("backends") && doc["backends"].is_array())
        for (const auto& b : doc["backends"]) {
            auto ref = detail::backend_from_json(b);
            try {
                ref.validate();
            } catch (const ConfigError& e) {
                errors.push_back(e.what());
            }
            cfg.backends.push_back(std::move(ref));
        }
    if (cfg.backends.empty()) errors.push_back("at least one backend required");
    {
        std::set<std::string> ids;
        for (const auto& b : cfg.backends)
            if (!ids.insert(b.backend_id).second)
                errors.push_back("duplicate backend id: " + b.backend_id);
    }

    const auto& params = doc.contains("task_params") ? doc["task_params"] : nlohmann::ordered_json::object();
    switch (cfg.task) {
        case TaskSelection::PggMode1:
        case TaskSelection::PggMode2: {
            cfg.pgg.mode = cfg.task == TaskSelection::PggMode1 ? PggMode::IncomeFeedback
                                                               : PggMode::SortedInvestFeedback;
            cfg.pgg.n_participants = params.value("n_participants",
                                                  static_cast<int>(cfg.backends.size()));
            cfg.pgg.alpha = params.value("alpha", 1.2);
            cfg.pgg.rounds = params.value("rounds", cfg.max_rounds);
            cfg.pgg.endowment_per_round = params.value("endowment", 10.0);
            try {
                cfg.pgg.validate();
            } catch (const ConfigError& e) {
                errors.push_back(e.what());
            }
            if (cfg.pgg.n_participants != static_cast<int>(cfg.backends.size()))
                errors.push_back("pgg seats the full roster: n_participants must equal backend count");
            break;
        }
        case TaskSelection::Idiom:
            cfg.dictionary_path = params.value("dictionary", "");
            if (cfg.dictionary_path.empty()) errors.push_back("idiom task requires task_params.dictionary");
            if (cfg.backends.size() < 2) errors.push_back("idiom task requires at least 2 backends");
            break;
        case TaskSelection::CodeReview:
            cfg.items_path = params.value("problems", "");
            if (cfg.items_path.empty()) errors.push_back("code_review requires task_params.problems");
            if (cfg.backends.size() < 2) errors.push_back("code_review requires at least 2 backends");
            break;
        case TaskSelection::MachineTranslation: {
            cfg.items_path = params.value("segments", "");
            if (cfg.items_path.empty())
                errors.push_back("machine_translation requires task_params.segments");
            if (cfg.backends.size() < 2)
                errors.push_back("machine_translation requires at least 2 backends");
            try {
                auto pair = language_pair(params.value("language_pair", "de-en"));
                cfg.source_lang = pair.first;
                cfg.target_lang = pair.second;
            } catch (const ConfigError& e) {
                errors.push_back(e.what());
            }
            break;
        }
    }

    if (doc.contains("judge")) {
        auto ref = detail::backend_from_json(doc["judge"]);
        try {
            ref.validate();
        } catch (const ConfigError& e) {
            errors.push_back(e.what());
        }
        cfg.judge = std::move(ref);
    }
    if (is_judge_scored(cfg.task) && !cfg.judge)
        errors.push_back("judge backend required for judge-scored task");

    if (!errors.empty()) throw ConfigError(join(errors, "; "));
    return cfg;
}

inline EvaluationConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config: " + path);
    auto doc = nlohmann::ordered_json::parse(f, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ConfigError("config is not valid json: " + path);
    return parse_config(doc);
}

// Work items: each non-blank line is either a JSON record with id/text or
// a raw text line.
inline std::vector<WorkItem> load_work_items(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read items file: " + path);
    std::vector<WorkItem> items;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto body = trim(line);
        if (body.empty()) continue;
        auto j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
        if (!j.is_discarded() && j.is_object() && j.contains("text"))
            items.push_back({j.value("id", "item" + std::to_string(lineno)), j["text"]});
        else
            items.push_back({"item" + std::to_string(lineno), body});
    }
    if (items.empty()) throw ConfigError("items file is empty: " + path);
    return items;
}

}  // namespace arena
