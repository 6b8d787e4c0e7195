// Evaluation runner: executes a match plan with bounded parallelism,
// persists one transcript per run, aggregates payoffs into ability scores
// and report files, and supports resume / replay / re-render.
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arena/config.hpp"
#include "arena/metrics.hpp"
#include "arena/orchestrator.hpp"
#include "arena/plan.hpp"
#include "arena/scripted_policies.hpp"
#include "arena/tasks/idiom_engine.hpp"
#include "arena/tasks/pgg_engine.hpp"
#include "arena/tasks/writer_editor_engine.hpp"
#include "arena/transcript.hpp"

namespace arena {

struct RunRecord {
    int match_index = 0;
    bool valid = false;
    std::string abort_reason;
    std::string end_reason;
    std::map<std::string, double> payoffs_by_backend;
    std::map<std::string, int> roles_by_backend;  // 1-based role index
};

struct EvaluationArtifacts {
    MatchPlan plan;
    std::vector<RunRecord> records;
    PayoffMatrix payoff_matrix;
    RoleAssignment role_assignment;
    AbilityResult theta;
    StabilityTrace trace;
    StabilityReport stability;
    nlohmann::ordered_json report;
    std::string report_text;
    int invalid_runs = 0;
    bool ok = false;
};

inline std::string run_file_name(int match_index) {
    std::ostringstream os;
    os << "run_" << std::setw(4) << std::setfill('0') << match_index << ".jsonl";
    return os.str();
}

inline std::vector<std::string> role_names_for(TaskSelection task) {
    switch (task) {
        case TaskSelection::Idiom: return {"early", "late"};
        case TaskSelection::CodeReview: return {"programmer", "reviewer"};
        case TaskSelection::MachineTranslation: return {"translator", "proofreader"};
        default: return {"participant"};
    }
}

namespace detail {

inline std::unique_ptr<TaskEngine> make_engine(const EvaluationConfig& cfg, const Match& match,
                                               const std::vector<std::string>& seat_aliases) {
    switch (cfg.task) {
        case TaskSelection::PggMode1:
        case TaskSelection::PggMode2:
            return std::make_unique<PggEngine>(cfg.pgg, seat_aliases);
        case TaskSelection::Idiom:
            return std::make_unique<IdiomEngine>(load_idiom_dictionary(cfg.dictionary_path),
                                                 match.item_text, seat_aliases, cfg.max_rounds);
        case TaskSelection::CodeReview:
            return std::make_unique<WriterEditorEngine>(
                WriterEditorSpec::code_review(match.item_text, cfg.max_exchanges), seat_aliases);
        case TaskSelection::MachineTranslation:
            return std::make_unique<WriterEditorEngine>(
                WriterEditorSpec::machine_translation(cfg.source_lang, cfg.target_lang,
                                                      match.item_text),
                seat_aliases);
    }
    throw ConfigError("unhandled task");
}

}  // namespace detail

// Executes one planned match; the transcript records everything needed to
// rebuild the run record later.
inline std::pair<Transcript, RunRecord> execute_match(const EvaluationConfig& cfg,
                                                      const Match& match,
                                                      const RetryBudget& budget = {}) {
    std::vector<BackendRef> seated;
    for (auto idx : match.seats) seated.push_back(cfg.backends[idx]);

    auto handles = assign_aliases(seated, match.seed, make_backend);

    // Seat order defines role order; aliases are a seeded permutation on
    // top of it.
    std::vector<std::string> seat_aliases;
    for (const auto& ref : seated)
        for (const auto& h : handles)
            if (h.ref.backend_id == ref.backend_id) seat_aliases.push_back(h.alias);

    auto engine = detail::make_engine(cfg, match, seat_aliases);

    std::shared_ptr<Backend> judge;
    if (engine->judge_scored())
        judge = make_backend(*cfg.judge, derive_seed(match.seed, 0x6a));

    std::string run_id = "run_" + std::to_string(match.index);
    Transcript transcript(run_id);
    transcript.emit("run_header", 0,
                    {{"task", to_string(cfg.task)},
                     {"match_index", match.index},
                     {"repeat", match.repeat},
                     {"item_id", match.item_id}});

    MessagePool pool(run_id);
    RunResult result = run_task(*engine, pool, handles, transcript, judge.get(), budget);

    RunRecord record;
    record.match_index = match.index;
    record.valid = result.valid;
    record.abort_reason = result.abort_reason;
    if (result.end_reason) record.end_reason = to_string(*result.end_reason);

    nlohmann::ordered_json backend_map, role_map, payoff_map;
    for (const auto& h : handles) {
        backend_map[h.alias] = h.ref.backend_id;
        int role = engine->role_index(h.alias);
        role_map[h.alias] = role;
        record.roles_by_backend[h.ref.backend_id] = role;
        if (result.valid) {
            auto it = result.payoffs.find(h.alias);
            if (it != result.payoffs.end()) {
                record.payoffs_by_backend[h.ref.backend_id] = it->second;
                payoff_map[h.ref.backend_id] = it->second;
            }
        }
    }
    transcript.emit("result", result.rounds,
                    {{"valid", record.valid},
                     {"abort_reason", record.abort_reason},
                     {"end_reason", record.end_reason},
                     {"backends", backend_map},
                     {"roles", role_map},
                     {"payoffs_by_backend", payoff_map}});
    return {std::move(transcript), std::move(record)};
}

// Rebuilds a run record from a persisted transcript (resume and replay).
inline std::optional<RunRecord> record_from_transcript(const Transcript& t) {
    auto results = t.events_of("result");
    auto headers = t.events_of("run_header");
    if (results.empty() || headers.empty()) return std::nullopt;
    const auto& r = results.back();
    RunRecord rec;
    rec.match_index = headers.back().value("match_index", 0);
    rec.valid = r.value("valid", false);
    rec.abort_reason = r.value("abort_reason", "");
    rec.end_reason = r.value("end_reason", "");
    std::map<std::string, std::string> backend_of_alias;
    for (const auto& [alias, backend] : r.at("backends").items())
        backend_of_alias[alias] = backend.get<std::string>();
    for (const auto& [alias, role] : r.at("roles").items())
        rec.roles_by_backend[backend_of_alias.at(alias)] = role.get<int>();
    if (r.contains("payoffs_by_backend"))
        for (const auto& [backend, v] : r.at("payoffs_by_backend").items())
            rec.payoffs_by_backend[backend] = v.get<double>();
    return rec;
}

// --- Aggregation ---------------------------------------------------------

inline EvaluationArtifacts aggregate(const EvaluationConfig& cfg, MatchPlan plan,
                                     std::vector<RunRecord> records) {
    EvaluationArtifacts art;
    art.plan = std::move(plan);
    art.records = std::move(records);

    std::vector<std::string> agent_ids;
    for (const auto& b : cfg.backends) agent_ids.push_back(b.backend_id);

    // Valid runs become matrix columns; aborted runs are never admitted.
    art.payoff_matrix.agent_ids = agent_ids;
    art.payoff_matrix.values.assign(agent_ids.size(), {});
    art.role_assignment.values.assign(agent_ids.size(), {});
    for (const auto& rec : art.records) {
        if (!rec.valid) {
            ++art.invalid_runs;
            continue;
        }
        for (std::size_t i = 0; i < agent_ids.size(); ++i) {
            auto p = rec.payoffs_by_backend.find(agent_ids[i]);
            auto r = rec.roles_by_backend.find(agent_ids[i]);
            if (p != rec.payoffs_by_backend.end() && r != rec.roles_by_backend.end()) {
                art.payoff_matrix.values[i].push_back(p->second);
                art.role_assignment.values[i].push_back(r->second);
            } else {
                art.payoff_matrix.values[i].push_back(std::nullopt);
                art.role_assignment.values[i].push_back(std::nullopt);
            }
        }
    }

    const auto roles = role_names_for(cfg.task);
    if (art.payoff_matrix.repeats() > 0) {
        art.theta = is_pairwise(cfg.task)
                        ? asymmetric_score(art.payoff_matrix, art.role_assignment, roles)
                        : symmetric_score(art.payoff_matrix);
        art.trace = StabilityTrace::from_matrix(art.payoff_matrix);
        double lo = 0, hi = 0;
        bool first = true;
        for (const auto& row : art.payoff_matrix.values)
            for (const auto& cell : row)
                if (cell) {
                    lo = first ? *cell : std::min(lo, *cell);
                    hi = first ? *cell : std::max(hi, *cell);
                    first = false;
                }
        double epsilon = 0.05 * std::max(hi - lo, 1e-9);
        art.stability = stability_check(art.trace, epsilon);
    }

    // Report document.
    nlohmann::ordered_json rep;
    rep["task"] = to_string(cfg.task);
    rep["agents"] = agent_ids;
    rep["repeats_planned"] = static_cast<int>(art.plan.matches.size());
    rep["runs_valid"] = static_cast<int>(art.payoff_matrix.repeats());
    rep["runs_invalid"] = art.invalid_runs;
    rep["roles"] = roles;

    auto theta_json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < art.theta.cells.size(); ++i) {
        nlohmann::ordered_json row;
        row["agent"] = agent_ids[i];
        auto cells = nlohmann::ordered_json::array();
        for (const auto& cell : art.theta.cells[i]) {
            nlohmann::ordered_json jc;
            jc["theta"] = cell.theta ? nlohmann::ordered_json(*cell.theta)
                                     : nlohmann::ordered_json(nullptr);
            jc["samples"] = cell.samples;
            cells.push_back(jc);
        }
        row["cells"] = cells;
        theta_json.push_back(row);
    }
    rep["theta"] = theta_json;

    nlohmann::ordered_json stab;
    stab["sufficient_repeats"] = art.stability.sufficient;
    stab["converged"] = art.stability.converged;
    stab["max_delta"] = art.stability.max_delta;
    stab["epsilon"] = art.stability.epsilon;
    stab["window"] = art.stability.window;
    rep["stability"] = stab;

    // Per-agent payoff distributions for boxplot style reporting.
    nlohmann::ordered_json dist;
    for (std::size_t i = 0; i < agent_ids.size(); ++i) {
        std::vector<double> values;
        for (const auto& cell : art.payoff_matrix.values[i])
            if (cell) values.push_back(*cell);
        auto s = five_number_summary(values);
        dist[agent_ids[i]] = {{"min", s.min},    {"q1", s.q1},   {"median", s.median},
                              {"q3", s.q3},      {"max", s.max}, {"samples", s.samples}};
    }
    rep["distributions"] = dist;

    std::ostringstream text;
    text << "task: " << to_string(cfg.task) << "\n";
    text << "valid runs: " << art.payoff_matrix.repeats() << "  invalid: " << art.invalid_runs
         << "\n\n";

    if (is_pairwise(cfg.task)) {
        std::vector<MatchRecord> pair_records;
        for (std::size_t k = 0; k < art.records.size(); ++k) {
            const auto& rec = art.records[k];
            if (!rec.valid) continue;
            const auto& match = art.plan.matches[static_cast<std::size_t>(rec.match_index)];
            MatchRecord mr;
            mr.row_agent = cfg.backends[match.seats[0]].backend_id;
            mr.col_agent = cfg.backends[match.seats[1]].backend_id;
            mr.row_payoff = rec.payoffs_by_backend.at(mr.row_agent);
            mr.col_payoff = rec.payoffs_by_backend.at(mr.col_agent);
            pair_records.push_back(mr);
        }
        auto table = build_pairwise_table(agent_ids, pair_records, roles[0], roles[1]);
        rep["pairwise_table"] = pairwise_table_json(table);
        text << render_pairwise_table(table) << "\n";
    }

    text << "theta (mean score";
    if (is_pairwise(cfg.task)) text << " per role";
    text << "):\n";
    for (std::size_t i = 0; i < art.theta.cells.size(); ++i) {
        text << "  " << std::setw(14) << agent_ids[i] << " ";
        for (std::size_t l = 0; l < art.theta.role_names.size(); ++l) {
            const auto& cell = art.theta.cells[i][l];
            text << art.theta.role_names[l] << "=" << format_score(cell.theta) << " (n="
                 << cell.samples << ")  ";
        }
        text << "\n";
    }
    art.report = rep;
    art.report_text = text.str();
    art.ok = art.plan.matches.empty()
                 ? false
                 : static_cast<double>(art.invalid_runs) / art.plan.matches.size() <=
                       cfg.invalid_tolerance;
    return art;
}

// --- Evaluation entry points ----------------------------------------------

inline void write_artifacts(const EvaluationConfig& cfg, const EvaluationArtifacts& art) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream f(cfg.out_dir + "/config.json");
        f << cfg.raw.dump(2) << "\n";
    }
    {
        std::ofstream f(cfg.out_dir + "/plan.json");
        f << plan_to_json(art.plan).dump(2) << "\n";
    }
    {
        // Payoff + role matrices, diff-stable ordering.
        nlohmann::ordered_json m;
        m["agents"] = art.payoff_matrix.agent_ids;
        auto v = nlohmann::ordered_json::array(), s = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < art.payoff_matrix.values.size(); ++i) {
            auto vrow = nlohmann::ordered_json::array(), srow = nlohmann::ordered_json::array();
            for (std::size_t j = 0; j < art.payoff_matrix.values[i].size(); ++j) {
                const auto& cell = art.payoff_matrix.values[i][j];
                vrow.push_back(cell ? nlohmann::ordered_json(*cell) : nlohmann::ordered_json(nullptr));
                const auto& role = art.role_assignment.values[i][j];
                srow.push_back(role ? nlohmann::ordered_json(*role) : nlohmann::ordered_json(nullptr));
            }
            v.push_back(vrow);
            s.push_back(srow);
        }
        m["payoffs"] = v;
        m["roles"] = s;
        std::ofstream f(cfg.out_dir + "/matrices.json");
        f << m.dump(2) << "\n";
    }
    {
        std::ofstream f(cfg.out_dir + "/report.json");
        f << art.report.dump(2) << "\n";
    }
    {
        std::ofstream f(cfg.out_dir + "/report.txt");
        f << art.report_text;
    }
    {
        // Stability trace: running mean per agent after each repeat.
        nlohmann::ordered_json t;
        t["agents"] = art.trace.agent_ids;
        t["running_means"] = art.trace.running_means;
        std::ofstream f(cfg.out_dir + "/stability.json");
        f << t.dump(2) << "\n";
    }
}

// Runs the full plan. With resume=true, matches whose transcript already
// holds a result event are loaded instead of re-executed.
inline EvaluationArtifacts run_evaluation(const EvaluationConfig& cfg, bool resume = false,
                                          const RetryBudget& budget = {}) {
    namespace fs = std::filesystem;
    auto plan = plan_matches(cfg);
    fs::create_directories(cfg.out_dir);

    std::vector<RunRecord> records(plan.matches.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mu;

    auto worker = [&]() {
        while (true) {
            std::size_t k = next.fetch_add(1);
            if (k >= plan.matches.size() || failed.load()) return;
            const auto& match = plan.matches[k];
            const std::string path = cfg.out_dir + "/" + run_file_name(match.index);
            try {
                if (resume && fs::exists(path)) {
                    if (auto rec = record_from_transcript(Transcript::load(path))) {
                        records[k] = *rec;
                        continue;
                    }
                }
                auto [transcript, record] = execute_match(cfg, match, budget);
                transcript.save(path);
                records[k] = std::move(record);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    int threads = cfg.parallelism > 0
                      ? cfg.parallelism
                      : static_cast<int>(std::min<std::size_t>(4, plan.matches.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw Error("evaluation failed: " + first_error);

    auto art = aggregate(cfg, std::move(plan), std::move(records));
    write_artifacts(cfg, art);
    return art;
}

// Recomputes ability scores from persisted transcripts and checks them
// against the stored report. Returns the list of disagreements (empty =
// replay matches).
inline std::vector<std::string> replay_evaluation(const std::string& dir) {
    EvaluationConfig cfg = load_config(dir + "/config.json");
    cfg.out_dir = dir;
    auto plan = plan_matches(cfg);

    std::vector<std::string> mismatches;
    std::vector<RunRecord> records;
    for (const auto& match : plan.matches) {
        const std::string path = dir + "/" + run_file_name(match.index);
        auto rec = record_from_transcript(Transcript::load(path));
        if (!rec) {
            mismatches.push_back("transcript missing result event: " + path);
            continue;
        }
        records.push_back(*rec);
    }
    auto art = aggregate(cfg, plan, records);

    std::ifstream f(dir + "/report.json");
    if (!f) return {"missing report.json in " + dir};
    auto stored = nlohmann::ordered_json::parse(f, nullptr, false);
    if (stored.is_discarded()) return {"unparseable report.json in " + dir};

    const auto& fresh_theta = art.report["theta"];
    const auto& stored_theta = stored["theta"];
    if (fresh_theta.dump() != stored_theta.dump())
        mismatches.push_back("theta recomputed from transcripts differs from stored report");

    // When every backend is scripted the run itself is reproducible:
    // re-execute and compare transcripts byte-for-byte.
    bool all_scripted = cfg.judge ? cfg.judge->flavor == BackendFlavor::Scripted : true;
    for (const auto& b : cfg.backends) all_scripted &= b.flavor == BackendFlavor::Scripted;
    if (all_scripted) {
        for (const auto& match : plan.matches) {
            const std::string path = dir + "/" + run_file_name(match.index);
            std::ifstream rf(path, std::ios::binary);
            std::stringstream stored_bytes;
            stored_bytes << rf.rdbuf();
            auto [transcript, record] = execute_match(cfg, match);
            if (transcript.to_jsonl() != stored_bytes.str())
                mismatches.push_back("replayed transcript differs: " + path);
        }
    }
    return mismatches;
}

// Re-renders report files from the persisted transcripts.
inline EvaluationArtifacts rerender_report(const std::string& dir) {
    EvaluationConfig cfg = load_config(dir + "/config.json");
    cfg.out_dir = dir;
    auto plan = plan_matches(cfg);
    std::vector<RunRecord> records;
    for (const auto& match : plan.matches) {
        auto rec = record_from_transcript(Transcript::load(dir + "/" + run_file_name(match.index)));
        if (!rec) throw Error("transcript incomplete for match " + std::to_string(match.index));
        records.push_back(*rec);
    }
    auto art = aggregate(cfg, std::move(plan), std::move(records));
    write_artifacts(cfg, art);
    return art;
}

// All prompt payloads sent to backends during a run (anonymity scans).
inline std::vector<std::string> transcript_prompts(const Transcript& t) {
    std::vector<std::string> out;
    for (const auto& e : t.events_of("agent_request")) out.push_back(e.value("payload", ""));
    for (const auto& e : t.events_of("rule_broadcast")) out.push_back(e.value("body", ""));
    for (const auto& e : t.events_of("referee_feedback")) out.push_back(e.value("body", ""));
    return out;
}

}  // namespace arena
