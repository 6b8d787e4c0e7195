#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "arena/runner.hpp"

using namespace arena;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = ARENA_FIXTURES;

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("arena_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::ordered_json pgg_doc(const std::string& out_dir, int repeats = 3) {
    nlohmann::ordered_json doc;
    doc["task"] = "pgg_mode1";
    doc["seed"] = 42;
    doc["repeats"] = repeats;
    doc["out"] = out_dir;
    doc["max_rounds"] = 3;
    doc["backends"] = nlohmann::ordered_json::array();
    for (int i = 0; i < 4; ++i)
        doc["backends"].push_back({{"id", "bot-" + std::to_string(i)},
                                   {"flavor", "scripted"},
                                   {"params",
                                    {{"policy", "pgg_constant"},
                                     {"coins", std::to_string(2 * i)}}}});
    return doc;
}

nlohmann::ordered_json code_review_doc(const std::string& out_dir, int repeats = 1) {
    nlohmann::ordered_json doc;
    doc["task"] = "code_review";
    doc["seed"] = 7;
    doc["repeats"] = repeats;
    doc["out"] = out_dir;
    doc["max_exchanges"] = 3;
    doc["task_params"] = {{"problems", kFixtures + "/problems.jsonl"}};
    doc["backends"] = nlohmann::ordered_json::array();
    doc["backends"].push_back(
        {{"id", "dev-one"}, {"flavor", "scripted"}, {"params", {{"policy", "we_auto"}}}});
    doc["backends"].push_back(
        {{"id", "dev-two"},
         {"flavor", "scripted"},
         {"params", {{"policy", "we_auto"}, {"k", "1"}}}});
    doc["judge"] = {{"id", "bench"}, {"flavor", "scripted"}, {"params", {{"policy", "judge_fixed"}}}};
    return doc;
}

}  // namespace

TEST_CASE("config parsing collects every violation at once") {
    nlohmann::ordered_json doc;
    doc["task"] = "poker";
    doc["repeats"] = 0;
    doc["max_rounds"] = 0;
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find("unknown task") != std::string::npos);
        CHECK(what.find("repeats must be >= 1") != std::string::npos);
        CHECK(what.find("max_rounds must be >= 1") != std::string::npos);
        CHECK(what.find("at least one backend required") != std::string::npos);
        CHECK(std::count(what.begin(), what.end(), ';') >= 3);
    }
}

TEST_CASE("config parsing flags duplicates and per-task requirements") {
    nlohmann::ordered_json doc;
    doc["task"] = "idiom";
    doc["backends"] = {{{"id", "same"}, {"flavor", "scripted"}, {"params", {{"policy", "echo"}}}},
                       {{"id", "same"}, {"flavor", "scripted"}, {"params", {{"policy", "echo"}}}}};
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find("duplicate backend id: same") != std::string::npos);
        CHECK(what.find("task_params.dictionary") != std::string::npos);
    }

    nlohmann::ordered_json judgeless = code_review_doc("/tmp/unused");
    judgeless.erase("judge");
    CHECK_THROWS_WITH_AS(parse_config(judgeless),
                         "judge backend required for judge-scored task", ConfigError);

    auto pgg = pgg_doc("/tmp/unused");
    pgg["task_params"] = {{"n_participants", 3}};
    try {
        parse_config(pgg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("full roster") != std::string::npos);
    }
}

TEST_CASE("language pairs") {
    CHECK(language_pair("de-en") == std::pair<std::string, std::string>{"German", "English"});
    CHECK(language_pair("en-zh") == std::pair<std::string, std::string>{"English", "Chinese"});
    CHECK(language_pair("Dutch-Swedish") ==
          std::pair<std::string, std::string>{"Dutch", "Swedish"});
    CHECK_THROWS_AS(language_pair("nonsense"), ConfigError);
}

TEST_CASE("work items load as json records or raw lines") {
    auto items = load_work_items(kFixtures + "/problems.jsonl");
    REQUIRE(items.size() == 3);
    CHECK(items[0].id == "sum_two");
    CHECK(items[0].text.find("sum of two integers") != std::string::npos);

    auto raw_path = fresh_dir("rawitems") / "items.txt";
    std::ofstream(raw_path) << "first line task\n\nsecond line task\n";
    auto raw = load_work_items(raw_path.string());
    REQUIRE(raw.size() == 2);
    CHECK(raw[0].id == "item1");
    CHECK(raw[1].text == "second line task");

    CHECK_THROWS_AS(load_work_items("/nonexistent"), ConfigError);
}

TEST_CASE("roster tasks plan one match per repeat, full table for pairs") {
    auto cfg = parse_config(pgg_doc("/tmp/unused", 5));
    auto plan = plan_matches(cfg);
    CHECK(plan.matches.size() == 5);
    for (const auto& m : plan.matches) CHECK(m.seats.size() == 4);
    // Seeds differ per repeat, deterministically.
    CHECK(plan.matches[0].seed != plan.matches[1].seed);
    auto again = plan_matches(cfg);
    CHECK(again.matches[3].seed == plan.matches[3].seed);

    // Pairwise with 2 backends, 3 problems, 2 repeats: 2 ordered pairs x 6
    // items = 12 matches, each pair seated in both role orders.
    auto cr = parse_config(code_review_doc("/tmp/unused", 2));
    auto cr_plan = plan_matches(cr);
    CHECK(cr_plan.matches.size() == 12);
    int seat_orders[2] = {0, 0};
    for (const auto& m : cr_plan.matches) {
        REQUIRE(m.seats.size() == 2);
        ++seat_orders[m.seats[0]];
        CHECK_FALSE(m.item_text.empty());
    }
    CHECK(seat_orders[0] == 6);
    CHECK(seat_orders[1] == 6);
}

TEST_CASE("idiom plans sample openings from the dictionary deterministically") {
    nlohmann::ordered_json doc;
    doc["task"] = "idiom";
    doc["seed"] = 9;
    doc["repeats"] = 4;
    doc["task_params"] = {{"dictionary", kFixtures + "/idioms30.txt"}};
    doc["backends"] = {
        {{"id", "g1"},
         {"flavor", "scripted"},
         {"params", {{"policy", "idiom_greedy"}, {"dictionary", kFixtures + "/idioms30.txt"}}}},
        {{"id", "g2"},
         {"flavor", "scripted"},
         {"params", {{"policy", "idiom_greedy"}, {"dictionary", kFixtures + "/idioms30.txt"}}}}};
    auto cfg = parse_config(doc);
    auto plan = plan_matches(cfg);
    CHECK(plan.matches.size() == 8);  // 2 ordered pairs x 4 openings
    auto dict = load_idiom_dictionary(cfg.dictionary_path);
    for (const auto& m : plan.matches) CHECK(dict.contains(m.item_text));
    CHECK(plan_to_json(plan) == plan_to_json(plan_matches(cfg)));
}

TEST_CASE("end-to-end roster evaluation produces the full artifact set") {
    auto dir = fresh_dir("e2e_pgg");
    auto cfg = parse_config(pgg_doc(dir.string(), 3));
    auto art = run_evaluation(cfg);

    CHECK(art.ok);
    CHECK(art.invalid_runs == 0);
    CHECK(art.records.size() == 3);
    CHECK(art.payoff_matrix.repeats() == 3);

    for (const char* file : {"config.json", "plan.json", "matrices.json", "report.json",
                             "report.txt", "stability.json", "run_0000.jsonl", "run_0001.jsonl",
                             "run_0002.jsonl"})
        CHECK(fs::exists(dir / file));

    // Constant policies: every repeat yields the same payoff, so the
    // stability check converges and theta matches the single-run payoff.
    CHECK(art.stability.converged);
    CHECK(art.report["runs_valid"] == 3);
    for (std::size_t i = 0; i < art.theta.cells.size(); ++i)
        CHECK(art.theta.cells[i][0].samples == 3);

    // bot-0 invests 0 and free-rides; bot-3 invests 6. Shares are equal,
    // so the free rider banks more.
    auto ids = art.payoff_matrix.agent_ids;
    auto theta_of = [&](const std::string& id) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return *art.theta.cells[i][0].theta;
        FAIL("missing agent");
        return 0.0;
    };
    CHECK(theta_of("bot-0") > theta_of("bot-3"));

    // Conservation across the whole run: Σ payoffs = N * E * rounds +
    // (alpha - 1) * total pool. Pool per round = 0+2+4+6 = 12.
    double total = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) total += *art.theta.cells[i][0].theta;
    CHECK(total == doctest::Approx(4 * 10.0 * 3 + 0.2 * 12 * 3).epsilon(1e-12));
}

TEST_CASE("replay validates stored scores and reproduces scripted runs") {
    auto dir = fresh_dir("e2e_replay");
    auto cfg = parse_config(pgg_doc(dir.string(), 2));
    run_evaluation(cfg);
    CHECK(replay_evaluation(dir.string()).empty());

    // Corrupt one stored payoff: replay must flag the report mismatch.
    auto report_path = dir / "report.json";
    std::ifstream in(report_path);
    auto report = nlohmann::ordered_json::parse(in);
    in.close();
    report["theta"][0]["cells"][0]["theta"] = 999.0;
    std::ofstream(report_path) << report.dump(2);
    auto mismatches = replay_evaluation(dir.string());
    REQUIRE_FALSE(mismatches.empty());
    CHECK(mismatches[0].find("theta") != std::string::npos);
}

TEST_CASE("resume skips completed transcripts and reaches the same result") {
    auto dir = fresh_dir("e2e_resume");
    auto cfg = parse_config(pgg_doc(dir.string(), 4));
    auto first = run_evaluation(cfg);

    // Drop two run files; resume re-executes only those.
    fs::remove(dir / "run_0001.jsonl");
    fs::remove(dir / "run_0003.jsonl");
    auto resumed = run_evaluation(cfg, /*resume=*/true);
    CHECK(resumed.records.size() == 4);
    CHECK(resumed.report.dump() == first.report.dump());
    CHECK(replay_evaluation(dir.string()).empty());
}

TEST_CASE("judge-scored pairwise evaluation end to end") {
    auto dir = fresh_dir("e2e_cr");
    auto cfg = parse_config(code_review_doc(dir.string(), 1));
    auto art = run_evaluation(cfg);
    CHECK(art.ok);
    CHECK(art.records.size() == 6);  // 2 ordered pairs x 3 problems
    CHECK(art.invalid_runs == 0);

    // Judge-fixed scores: writer 8.5, editor 8.8 in every match.
    CHECK(art.report.contains("pairwise_table"));
    for (std::size_t i = 0; i < art.theta.cells.size(); ++i) {
        REQUIRE(art.theta.cells[i].size() == 2);
        CHECK(*art.theta.cells[i][0].theta == doctest::Approx(8.5));
        CHECK(*art.theta.cells[i][1].theta == doctest::Approx(8.8));
    }
    auto text = art.report_text;
    CHECK(text.find("rows: programmer  columns: reviewer") != std::string::npos);
    CHECK(text.find("8.50/8.80") != std::string::npos);
    CHECK(replay_evaluation(dir.string()).empty());
}

TEST_CASE("invalid-run tolerance drives the exit outcome") {
    auto dir = fresh_dir("e2e_tolerance");
    auto doc = pgg_doc(dir.string(), 2);
    doc["backends"][1]["params"] = {{"policy", "fail"}};
    doc["tolerance"] = 0.0;
    auto cfg = parse_config(doc);
    cfg.parallelism = 1;
    auto art = run_evaluation(cfg, false, RetryBudget{1, std::chrono::milliseconds(1)});
    CHECK(art.invalid_runs == 2);
    CHECK_FALSE(art.ok);
    CHECK(art.payoff_matrix.repeats() == 0);  // aborted runs never become columns

    doc["tolerance"] = 1.0;
    auto lenient = run_evaluation(parse_config(doc), false,
                                  RetryBudget{1, std::chrono::milliseconds(1)});
    CHECK(lenient.ok);
}

TEST_CASE("report re-rendering works from transcripts alone") {
    auto dir = fresh_dir("e2e_rerender");
    auto cfg = parse_config(pgg_doc(dir.string(), 2));
    auto first = run_evaluation(cfg);
    fs::remove(dir / "report.json");
    fs::remove(dir / "report.txt");
    auto art = rerender_report(dir.string());
    CHECK(fs::exists(dir / "report.json"));
    CHECK(art.report.dump() == first.report.dump());
}

TEST_CASE("the command line binary runs, validates and replays") {
    auto dir = fresh_dir("cli_smoke");
    auto doc = pgg_doc((dir / "out").string(), 2);
    auto config_path = dir / "config.json";
    std::ofstream(config_path) << doc.dump(2);

    const std::string cli = ARENA_CLI_PATH;
    auto run = [&](const std::string& args) {
        return std::system((cli + " " + args + " > " + (dir / "cli.log").string() + " 2>&1")
                               .c_str());
    };
    CHECK(run("validate --config " + config_path.string()) == 0);
    CHECK(run("run --config " + config_path.string()) == 0);
    CHECK(fs::exists(dir / "out" / "report.txt"));
    CHECK(run("replay --dir " + (dir / "out").string()) == 0);
    CHECK(run("report --dir " + (dir / "out").string()) == 0);
    CHECK(run("run --config /nonexistent.json") != 0);
    CHECK(run("validate") != 0);  // missing required option
}
