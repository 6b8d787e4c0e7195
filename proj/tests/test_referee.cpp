#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "arena/json_extract.hpp"
#include "arena/referee.hpp"
#include "arena/scripted_policies.hpp"
#include "arena/util.hpp"

using namespace arena;

namespace {
const std::string kFixtures = std::string(ARENA_FIXTURES) + "/judge_replies.jsonl";
}

TEST_CASE("extract_json_object finds the first balanced object") {
    auto simple = extract_json_object(R"({"a":1})");
    REQUIRE(simple);
    CHECK((*simple)["a"] == 1);

    auto wrapped = extract_json_object("prose {\"a\": {\"b\": 2}} trailing");
    REQUIRE(wrapped);
    CHECK((*wrapped)["a"]["b"] == 2);

    auto braces_in_string = extract_json_object(R"({"note":"keep {this} intact","n":3})");
    REQUIRE(braces_in_string);
    CHECK((*braces_in_string)["note"] == "keep {this} intact");

    auto escaped = extract_json_object(R"({"quote":"she said \"{\" loudly"})");
    REQUIRE(escaped);

    // A malformed candidate is skipped in favor of a later valid object.
    auto recovered = extract_json_object("{oops {\"a\": 1}");
    REQUIRE(recovered);
    CHECK((*recovered)["a"] == 1);

    CHECK_FALSE(extract_json_object(""));
    CHECK_FALSE(extract_json_object("no json here"));
    CHECK_FALSE(extract_json_object("[1, 2, 3]"));  // objects only
    CHECK_FALSE(extract_json_object("{\"a\": 1"));
}

TEST_CASE("judge reply fixtures parse exactly as recorded") {
    std::ifstream f(kFixtures);
    REQUIRE(f.good());
    std::string line;
    int cases = 0;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        auto rec = nlohmann::json::parse(line);
        ++cases;
        std::vector<std::string> roles = rec.at("roles").get<std::vector<std::string>>();
        auto verdict = parse_judge_reply(rec.at("reply").get<std::string>(), roles);
        INFO("fixture: " << rec.at("name").get<std::string>());
        CHECK(verdict.parse_ok == rec.at("expect_ok").get<bool>());
        CHECK(verdict.raw_reply == rec.at("reply").get<std::string>());
        if (rec.at("expect_ok").get<bool>()) {
            for (const auto& role : roles) {
                REQUIRE(verdict.roles.count(role) == 1);
                CHECK(verdict.roles.at(role).score ==
                      doctest::Approx(rec.at("scores").at(role).get<double>()));
            }
        }
    }
    CHECK(cases == 50);
}

TEST_CASE("judge parsing never crashes on arbitrary bytes") {
    SplitMix64 gen(123);
    const std::vector<std::string> roles{"Programmer", "Reviewer"};
    for (int trial = 0; trial < 20000; ++trial) {
        std::string garbage;
        std::size_t len = gen.below(80);
        for (std::size_t i = 0; i < len; ++i)
            garbage.push_back(static_cast<char>(gen.below(256)));
        auto verdict = parse_judge_reply(garbage, roles);
        // Determinism: a second parse agrees bit for bit.
        auto again = parse_judge_reply(garbage, roles);
        CHECK(verdict.parse_ok == again.parse_ok);
        if (verdict.parse_ok)
            for (const auto& [role, entry] : verdict.roles)
                CHECK(entry.score == again.roles.at(role).score);
    }
}

TEST_CASE("mutated valid replies stay within the schema or fail cleanly") {
    const std::string base =
        R"({"Programmer":{"evaluation":"ok","score":7},"Reviewer":{"evaluation":"ok","score":8}})";
    SplitMix64 gen(321);
    for (int trial = 0; trial < 5000; ++trial) {
        std::string mutated = base;
        std::size_t edits = 1 + gen.below(3);
        for (std::size_t e = 0; e < edits; ++e) {
            std::size_t pos = gen.below(mutated.size());
            mutated[pos] = static_cast<char>(32 + gen.below(95));
        }
        auto verdict = parse_judge_reply(mutated, {"Programmer", "Reviewer"});
        if (verdict.parse_ok)
            for (const auto& [role, entry] : verdict.roles) {
                CHECK(entry.score >= 1.0);
                CHECK(entry.score <= 10.0);
            }
    }
}

TEST_CASE("score_dialogue passes the rendered dialogue through the template") {
    auto policy = make_scripted_policy(
        {{"policy", "judge_fixed"},
         {"json", R"({"Programmer":{"evaluation":"a","score":9},)"
                  R"("Reviewer":{"evaluation":"b","score":4}})"}});
    ScriptedBackend judge(policy, 0);
    auto verdict = score_dialogue("Q + dialogue body", prompts::code_judge(),
                                  {"Programmer", "Reviewer"}, judge);
    REQUIRE(verdict.parse_ok);
    CHECK(verdict.roles.at("Programmer").score == doctest::Approx(9));
    CHECK(verdict.roles.at("Reviewer").score == doctest::Approx(4));

    auto seen = judge.seen_contexts();
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].find("Q + dialogue body") != std::string::npos);
    CHECK(seen[0].find("scale of 1-10") != std::string::npos);
}

TEST_CASE("score_dialogue tolerates wrapped judge output") {
    for (const std::string wrap : {"fenced", "prose"}) {
        ScriptedBackend judge(make_scripted_policy({{"policy", "judge_fixed"}, {"wrap", wrap}}),
                              0);
        auto verdict = score_dialogue("d", prompts::code_judge(), {"Programmer", "Reviewer"},
                                      judge);
        CHECK(verdict.parse_ok);
    }
}

TEST_CASE("a malformed first verdict triggers exactly one re-ask") {
    // Garbage until the reminder appears in the context, then a valid reply.
    auto policy = [](const std::string& context, std::uint64_t) -> std::string {
        if (context.find("did not follow the required json format") != std::string::npos)
            return R"({"Programmer":{"evaluation":"second try","score":6},)"
                   R"("Reviewer":{"evaluation":"second try","score":6}})";
        return "the programmer did splendidly, ten out of ten";
    };
    ScriptedBackend judge(policy, 0);
    auto verdict = score_dialogue("d", prompts::code_judge(), {"Programmer", "Reviewer"}, judge);
    REQUIRE(verdict.parse_ok);
    CHECK(verdict.roles.at("Programmer").evaluation == "second try");
    CHECK(judge.seen_contexts().size() == 2);
}

TEST_CASE("a second malformed verdict yields parse_ok=false, raw retained") {
    auto policy = [](const std::string&, std::uint64_t) { return std::string("never json"); };
    ScriptedBackend judge(policy, 0);
    auto verdict = score_dialogue("d", prompts::code_judge(), {"Programmer", "Reviewer"}, judge);
    CHECK_FALSE(verdict.parse_ok);
    CHECK(verdict.raw_reply == "never json");
    CHECK(judge.seen_contexts().size() == 2);
}

TEST_CASE("end judgment helpers") {
    auto none = EndJudgment::not_ended();
    CHECK_FALSE(none.ended);
    CHECK_FALSE(none.reason.has_value());
    auto ended = EndJudgment::ended_for(EndReason::TerminationToken);
    CHECK(ended.ended);
    CHECK(*ended.reason == EndReason::TerminationToken);
    CHECK(to_string(EndReason::RuleViolation) == "rule_violation");
}
