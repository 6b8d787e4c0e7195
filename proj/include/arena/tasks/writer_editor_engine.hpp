// Writer-editor engine shared by code review and machine translation.
// Odd rounds belong to the writer, even rounds to the editor; the editor's
// termination token or the exchange bound ends the loop, and a judge
// backend scores the dialogue afterwards.
#pragma once

#include "arena/tasks/engine.hpp"
#include "arena/tasks/writer_editor.hpp"

namespace arena {

struct WriterEditorSpec {
    std::string task_id;          // "code_review" | "machine_translation"
    std::string writer_role;      // "programmer" | "translator"
    std::string editor_role;      // "reviewer"   | "proofreader"
    std::string writer_judge_key; // "Programmer" | "Translator"
    std::string editor_judge_key; // "Reviewer"   | "Proofreader"
    std::map<std::string, std::string> bindings;  // Q, or L_s/L_t/T_s
    int max_exchanges = 5;

    static WriterEditorSpec code_review(std::string question, int max_exchanges = 5) {
        return {"code_review", "programmer", "reviewer", "Programmer", "Reviewer",
                {{"Q", std::move(question)}}, max_exchanges};
    }

    // Translator then proofreader; a single polish pass ends the task.
    static WriterEditorSpec machine_translation(std::string source_lang, std::string target_lang,
                                                std::string source_text) {
        return {"machine_translation", "translator", "proofreader", "Translator", "Proofreader",
                {{"L_s", std::move(source_lang)},
                 {"L_t", std::move(target_lang)},
                 {"T_s", std::move(source_text)}},
                /*max_exchanges=*/1};
    }
};

class WriterEditorEngine : public TaskEngine {
public:
    // aliases[0] writes, aliases[1] edits.
    WriterEditorEngine(WriterEditorSpec spec, std::vector<std::string> aliases)
        : spec_(std::move(spec)), aliases_(std::move(aliases)) {
        if (aliases_.size() != 2)
            throw ConfigError("writer-editor: exactly two participants required");
        state_.max_exchanges = spec_.max_exchanges;
        state_.task_prompt = requirement_text();

        game_.task_id = spec_.task_id;
        game_.kind = TaskKind::Asymmetric;
        game_.max_rounds = 2 * spec_.max_exchanges + 1;
        game_.roles = {
            {1, spec_.writer_role, [](int r) { return r % 2 == 1; }, [](int r) { return r % 2 == 0; }},
            {2, spec_.editor_role, [](int r) { return r % 2 == 0; }, [](int r) { return r % 2 == 1; }}};
        game_.rule_text = state_.task_prompt;

        int max_exchanges = spec_.max_exchanges;
        game_.terminal_predicate = [max_exchanges](const HistorySequence& h) {
            int editor_notes = 0;
            for (const auto& action : h.actions) {
                if (action.round % 2 == 0) {
                    if (trim(action.content.text) == kTerminationToken) return true;
                    if (++editor_notes >= max_exchanges) return true;
                }
            }
            return false;
        };
        // Judge-scored: payoffs read the verdict stored after end.
        game_.payoff_rule = [this](const HistorySequence&) { return judged_payoffs(); };
        game_.validate();
    }

    const GameDefinition& game() const override { return game_; }
    std::vector<std::string> participants() const override { return aliases_; }
    int role_index(const std::string& alias) const override { return alias == aliases_[0] ? 1 : 2; }
    std::string role_name(const std::string& alias) const override {
        return alias == aliases_[0] ? spec_.writer_role : spec_.editor_role;
    }

    std::string rule_text(const std::string& alias) const override {
        if (alias == aliases_[0])
            return render_task_prompt(spec_.task_id, spec_.writer_role, "initial", spec_.bindings);
        return state_.task_prompt;  // editor sees the requirement; its full role
                                    // prompt arrives with the first artifact
    }

    std::vector<std::string> senders(int round) const override {
        return {round % 2 == 1 ? aliases_[0] : aliases_[1]};
    }

    std::set<std::string> reply_visibility(const std::string&) const override {
        return {aliases_[0], aliases_[1]};
    }

    void on_reply(const std::string& alias, int round, const std::string& reply) override {
        bool writer_turn = round % 2 == 1;
        if ((writer_turn && alias != aliases_[0]) || (!writer_turn && alias != aliases_[1]))
            throw ContractError("writer-editor: turn from wrong role");
        state_ = writer_editor_step(state_, reply,
                                    writer_turn ? WriterEditorRole::Writer
                                                : WriterEditorRole::Editor);
        history_.actions.push_back(
            {round, alias,
             {writer_turn ? TaskAction::Kind::Code : TaskAction::Kind::Review, reply, 0.0}});
    }

    std::vector<PoolMessage> round_feedback(int round) override {
        if (state_.consensus || round >= game_.max_rounds) return {};
        bool writer_just_sent = round % 2 == 1;
        std::string body;
        if (writer_just_sent) {
            auto bindings = spec_.bindings;
            bindings["A"] = state_.artifact_versions.back();
            bindings["T_t"] = state_.artifact_versions.back();
            body = render_task_prompt(spec_.task_id, spec_.editor_role,
                                      state_.artifact_versions.size() == 1 ? "initial" : "followup",
                                      bindings);
            return {{round, kRefereeAlias, body, {aliases_[1]}}};
        }
        body = render_task_prompt(spec_.task_id, spec_.writer_role, "followup",
                                  {{"review comments", state_.editor_notes.back()}});
        return {{round, kRefereeAlias, body, {aliases_[0]}}};
    }

    EndJudgment end_state(int) const override {
        if (!state_.consensus) return EndJudgment::not_ended();
        return EndJudgment::ended_for(state_.reason == ConsensusReason::TerminationToken
                                          ? EndReason::TerminationToken
                                          : EndReason::MaxRounds);
    }

    bool judge_scored() const override { return true; }

    const PromptTemplate* judge_template() const override {
        return spec_.task_id == "code_review" ? &prompts::code_judge() : &prompts::mt_judge();
    }

    std::vector<std::string> judge_roles() const override {
        return {spec_.writer_judge_key, spec_.editor_judge_key};
    }

    std::string dialogue_view() const override {
        std::string out = state_.task_prompt;
        for (const auto& action : history_.actions) {
            const bool writer_turn = action.round % 2 == 1;
            out += "\n" + (writer_turn ? spec_.writer_judge_key : spec_.editor_judge_key) + ": " +
                   action.content.text;
        }
        return out;
    }

    void set_verdict(const JudgeVerdict& verdict) override { verdict_ = verdict; }

    std::vector<Payoff> payoffs() const override {
        HistorySequence terminal = history_;
        return compute_payoffs(terminal, game_);
    }

    const WriterEditorState& state() const { return state_; }

private:
    std::string requirement_text() const {
        if (spec_.task_id == "code_review") return "Question: " + spec_.bindings.at("Q");
        return "Translate from " + spec_.bindings.at("L_s") + " to " + spec_.bindings.at("L_t") +
               ".\nSource language text: " + spec_.bindings.at("T_s");
    }

    std::vector<Payoff> judged_payoffs() const {
        if (!verdict_.parse_ok)
            throw ContractError("writer-editor: payoffs requested without a valid verdict");
        return {{aliases_[0], verdict_.roles.at(spec_.writer_judge_key).score},
                {aliases_[1], verdict_.roles.at(spec_.editor_judge_key).score}};
    }

    WriterEditorSpec spec_;
    std::vector<std::string> aliases_;
    GameDefinition game_;
    WriterEditorState state_;
    HistorySequence history_;
    JudgeVerdict verdict_;
};

}  // namespace arena
