#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arena/orchestrator.hpp"
#include "arena/scripted_policies.hpp"
#include "arena/tasks/writer_editor_engine.hpp"

using namespace arena;

TEST_CASE("writer turns append artifact versions") {
    WriterEditorState state;
    state = writer_editor_step(state, "v1", WriterEditorRole::Writer);
    state = writer_editor_step(state, "needs work", WriterEditorRole::Editor);
    state = writer_editor_step(state, "v2", WriterEditorRole::Writer);
    CHECK(state.artifact_versions == std::vector<std::string>{"v1", "v2"});
    CHECK(state.editor_notes == std::vector<std::string>{"needs work"});
    CHECK_FALSE(state.consensus);
}

TEST_CASE("the termination token ends the exchange without an extra note") {
    WriterEditorState state;
    state = writer_editor_step(state, "v1", WriterEditorRole::Writer);
    state = writer_editor_step(state, "  over \n", WriterEditorRole::Editor);
    CHECK(state.consensus);
    CHECK(state.reason == ConsensusReason::TerminationToken);
    CHECK(state.editor_notes.empty());
}

TEST_CASE("only the exact trimmed token terminates") {
    WriterEditorState state;
    state.max_exchanges = 5;
    state = writer_editor_step(state, "v1", WriterEditorRole::Writer);
    for (const std::string note : {"overall good", "not over yet", "game over", "OVER"}) {
        auto next = writer_editor_step(state, note, WriterEditorRole::Editor);
        CHECK_FALSE(next.consensus);
    }
}

TEST_CASE("the exchange bound forces consensus") {
    WriterEditorState state;
    state.max_exchanges = 2;
    state = writer_editor_step(state, "v1", WriterEditorRole::Writer);
    state = writer_editor_step(state, "note 1", WriterEditorRole::Editor);
    CHECK_FALSE(state.consensus);
    state = writer_editor_step(state, "v2", WriterEditorRole::Writer);
    state = writer_editor_step(state, "note 2", WriterEditorRole::Editor);
    CHECK(state.consensus);
    CHECK(state.reason == ConsensusReason::MaxExchanges);
}

TEST_CASE("contract violations: talking past consensus, editing thin air") {
    WriterEditorState state;
    CHECK_THROWS_AS(writer_editor_step(state, "note", WriterEditorRole::Editor), ContractError);
    state = writer_editor_step(state, "v1", WriterEditorRole::Writer);
    state = writer_editor_step(state, "over", WriterEditorRole::Editor);
    CHECK_THROWS_AS(writer_editor_step(state, "v2", WriterEditorRole::Writer), ContractError);
}

TEST_CASE("engine wiring: roles, turn order, prompts") {
    auto spec = WriterEditorSpec::code_review("sum two ints", 3);
    WriterEditorEngine engine(spec, {"P1", "P2"});
    CHECK(engine.game().max_rounds == 7);
    CHECK(engine.senders(1) == std::vector<std::string>{"P1"});
    CHECK(engine.senders(2) == std::vector<std::string>{"P2"});
    CHECK(engine.role_name("P1") == "programmer");
    CHECK(engine.role_name("P2") == "reviewer");

    // The writer's rule text is the full role prompt; the editor first sees
    // only the requirement (its role prompt needs the first artifact).
    CHECK(engine.rule_text("P1").find("You will play the role of a programmer") !=
          std::string::npos);
    CHECK(engine.rule_text("P1").find("Question: sum two ints") != std::string::npos);
    CHECK(engine.rule_text("P2") == "Question: sum two ints");

    engine.on_reply("P1", 1, "def f(a,b): return a+b");
    auto msgs = engine.round_feedback(1);
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].visibility == std::set<std::string>{"P2"});
    CHECK(msgs[0].body.find("You will play the role of a code reviewer") != std::string::npos);
    CHECK(msgs[0].body.find("Programmer: def f(a,b): return a+b") != std::string::npos);

    engine.on_reply("P2", 2, "tighten naming");
    auto msgs2 = engine.round_feedback(2);
    REQUIRE(msgs2.size() == 1);
    CHECK(msgs2[0].visibility == std::set<std::string>{"P1"});
    CHECK(msgs2[0].body.find("Reviewer: tighten naming") != std::string::npos);

    engine.on_reply("P1", 3, "def add(a, b): return a + b");
    auto msgs3 = engine.round_feedback(3);
    REQUIRE(msgs3.size() == 1);
    CHECK(msgs3[0].body.find("please just output 'over'") != std::string::npos);
    CHECK(msgs3[0].body.find("Programmer: def add(a, b): return a + b") != std::string::npos);
}

TEST_CASE("engine rejects out-of-turn replies") {
    WriterEditorEngine engine(WriterEditorSpec::code_review("q", 2), {"P1", "P2"});
    CHECK_THROWS_AS(engine.on_reply("P2", 1, "note"), ContractError);
}

TEST_CASE("machine translation is a single polish pass") {
    auto spec = WriterEditorSpec::machine_translation("German", "English", "Hallo Welt");
    CHECK(spec.max_exchanges == 1);
    WriterEditorEngine engine(spec, {"P1", "P2"});
    CHECK(engine.game().max_rounds == 3);
    CHECK(engine.role_name("P1") == "translator");
    CHECK(engine.rule_text("P1").find("from German (source language) to English") !=
          std::string::npos);

    engine.on_reply("P1", 1, "Hello world");
    auto msgs = engine.round_feedback(1);
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].body.find("TRANSLATOR: Hello world") != std::string::npos);

    engine.on_reply("P2", 2, "Hello, world!");
    auto end = engine.end_state(2);
    CHECK(end.ended);
    CHECK(*end.reason == EndReason::MaxRounds);  // bound-driven consensus
}

TEST_CASE("dialogue view labels turns with judge keys") {
    WriterEditorEngine engine(WriterEditorSpec::code_review("q", 2), {"P1", "P2"});
    engine.on_reply("P1", 1, "v1");
    engine.on_reply("P2", 2, "note");
    auto view = engine.dialogue_view();
    CHECK(view.find("Question: q") != std::string::npos);
    CHECK(view.find("Programmer: v1") != std::string::npos);
    CHECK(view.find("Reviewer: note") != std::string::npos);
}

TEST_CASE("payoffs require a parsed verdict and map judge keys to seats") {
    WriterEditorEngine engine(WriterEditorSpec::code_review("q", 2), {"P1", "P2"});
    engine.on_reply("P1", 1, "v1");
    engine.on_reply("P2", 2, "over");
    CHECK(engine.end_state(2).ended);
    CHECK_THROWS_AS(engine.payoffs(), ContractError);

    auto verdict = parse_judge_reply(
        R"({"Programmer":{"evaluation":"ok","score":8},"Reviewer":{"evaluation":"ok","score":6}})",
        {"Programmer", "Reviewer"});
    REQUIRE(verdict.parse_ok);
    engine.set_verdict(verdict);
    auto payoffs = engine.payoffs();
    REQUIRE(payoffs.size() == 2);
    CHECK(payoffs[0].value == doctest::Approx(8.0));
    CHECK(payoffs[1].value == doctest::Approx(6.0));
}

TEST_CASE("liveness: an editor that never approves still terminates") {
    std::vector<BackendRef> roster{
        {"writer-a", BackendFlavor::Scripted, {{"policy", "writer_simple"}}},
        {"editor-b", BackendFlavor::Scripted, {{"policy", "editor_never"}}}};
    auto handles = assign_aliases(roster, 2, make_backend);
    std::string writer_alias, editor_alias;
    for (const auto& h : handles)
        (h.ref.backend_id == "writer-a" ? writer_alias : editor_alias) = h.alias;

    WriterEditorEngine engine(WriterEditorSpec::code_review("q", 3),
                              {writer_alias, editor_alias});
    auto judge = std::make_shared<ScriptedBackend>(
        make_scripted_policy({{"policy", "judge_fixed"}}), 0);
    MessagePool pool("r");
    Transcript t("r");
    RunResult result = run_task(engine, pool, handles, t, judge.get());
    REQUIRE(result.valid);
    CHECK(*result.end_reason == EndReason::MaxRounds);
    CHECK(result.rounds == 6);  // 3 full exchanges
    CHECK(engine.state().consensus);
    CHECK(engine.state().reason == ConsensusReason::MaxExchanges);
}

TEST_CASE("an early termination token shortens the run") {
    std::vector<BackendRef> roster{
        {"writer-a", BackendFlavor::Scripted, {{"policy", "writer_simple"}}},
        {"editor-b", BackendFlavor::Scripted, {{"policy", "editor_over_after"}, {"k", "2"}}}};
    auto handles = assign_aliases(roster, 6, make_backend);
    std::string writer_alias, editor_alias;
    for (const auto& h : handles)
        (h.ref.backend_id == "writer-a" ? writer_alias : editor_alias) = h.alias;

    WriterEditorEngine engine(WriterEditorSpec::code_review("q", 5),
                              {writer_alias, editor_alias});
    auto judge = std::make_shared<ScriptedBackend>(
        make_scripted_policy({{"policy", "judge_fixed"}}), 0);
    MessagePool pool("r");
    Transcript t("r");
    RunResult result = run_task(engine, pool, handles, t, judge.get());
    REQUIRE(result.valid);
    CHECK(*result.end_reason == EndReason::TerminationToken);
    CHECK(result.rounds == 4);
    CHECK(result.payoffs.at(writer_alias) == doctest::Approx(8.5));
    CHECK(result.payoffs.at(editor_alias) == doctest::Approx(8.8));
}
