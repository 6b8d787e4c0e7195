// Prompt templates for the four evaluation tasks plus the substitution
// engine. Placeholders are written {name}; only declared placeholders are
// substituted, so literal braces in format instructions survive untouched.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "arena/util.hpp"

namespace arena {

struct PromptTemplate {
    std::string text;
    std::vector<std::string> placeholders;  // all required
};

inline std::string render_template(const PromptTemplate& tpl,
                                   const std::map<std::string, std::string>& bindings) {
    std::vector<std::string> missing;
    for (const auto& key : tpl.placeholders)
        if (!bindings.count(key)) missing.push_back(key);
    if (!missing.empty())
        throw RenderError("unresolved placeholders: " + join(missing, ", "), missing);

    std::string out = tpl.text;
    for (const auto& key : tpl.placeholders) {
        const std::string token = "{" + key + "}";
        const std::string& value = bindings.at(key);
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

namespace prompts {

// --- Public goods game ---------------------------------------------------

inline const PromptTemplate& pgg_mode1_initial() {
    static const PromptTemplate tpl{
        "You are playing a game, there are {n} participants in this game, a total of "
        "{rounds} rounds. At the beginning of each round, you will get 10 coins. You can "
        "choose to invest X (0<=X<=10) coins in the public pool. At the end of each round, "
        "the coins in the public pool will be multiplied by {α} times and be evenly "
        "distributed to all participants. Your goal is to have the most coins at the end "
        "of the game.",
        {"n", "rounds", "α"}};
    return tpl;
}

inline const PromptTemplate& pgg_mode2_initial() {
    static const PromptTemplate tpl{
        "You are playing a game, there are {n} participants in this game, a total of "
        "{rounds} rounds. At the beginning of each round, you will be informed of the "
        "amount of invested coins in the last round, which is represented by a descending "
        "sorted list where each element is the amount of a player's invested coins. Then "
        "you will get 10 coins, you can choose to invest X (0<=X<=10) coins in the public "
        "pool. At the end of each round, the coins in the public pool will be multiplied "
        "by {α} times and be evenly distributed to all participants. Your goal is to have "
        "the most coins at the end of the game.",
        {"n", "rounds", "α"}};
    return tpl;
}

inline const PromptTemplate& pgg_mode1_followup() {
    static const PromptTemplate tpl{
        "In the last round you earned {income} coins. The {round} round starts, you get "
        "10 coins. Please give the amount of coins you want to invest and explain your "
        "decision reason.",
        {"income", "round"}};
    return tpl;
}

inline const PromptTemplate& pgg_mode2_followup() {
    static const PromptTemplate tpl{
        "In the last round the amount of invested coins is {sorted invest} where each "
        "element is the amount of a player's invested coins. The {round} round starts, "
        "you get 10 coins. Please give the amount of coins you want to invest and explain "
        "your decision reason.",
        {"sorted invest", "round"}};
    return tpl;
}

inline const PromptTemplate& pgg_format_instruction() {
    static const PromptTemplate tpl{
        "Your output must follow the json format below: "
        "`{\"reason\":\"<reason>\", \"coins\":<Investment amount>}`",
        {}};
    return tpl;
}

// --- Idiom solitaire -----------------------------------------------------

inline const PromptTemplate& idiom_turn() {
    static const PromptTemplate tpl{
        "You are participating in an idiom chain game. In this game, you need to give a "
        "four-character idiom where the first character matches the last character of the "
        "previous idiom. The idioms used in the same game cannot be repeated. If the "
        "first character of your output is incorrect or if it is not a Chinese idiom, "
        "your opponent wins. Your ultimate goal is to win the game. Next, I will provide "
        "you with the context of the current idiom chain and connect them using '→'. "
        "Please provide an appropriate idiom that follows these rules. Please note that "
        "you only need to provide the idiom without any other response. {S_I}",
        {"S_I"}};
    return tpl;
}

// --- Code review ---------------------------------------------------------

inline const PromptTemplate& code_programmer_initial() {
    static const PromptTemplate tpl{
        "You will play the role of a programmer, and you need to solve various "
        "programming problems provided by users, and provide complete and executable "
        "solutions. Remember, you only need to give pure Python code without any extra "
        "explanation. Question: {Q}",
        {"Q"}};
    return tpl;
}

inline const PromptTemplate& code_programmer_followup() {
    static const PromptTemplate tpl{
        "Reviewer: {review comments} Please give a revised solution based on the "
        "following review comments. Remember, you only need to give pure Python code "
        "without any extra explanation.",
        {"review comments"}};
    return tpl;
}

inline const PromptTemplate& code_reviewer_initial() {
    static const PromptTemplate tpl{
        "You will play the role of a code reviewer. You need to review the code provided "
        "by the programmer and give your feedback. You must comment on the nature of the "
        "code in three aspects: Code correctness, Code clarity, and Efficiency. "
        "Question: {Q} Programmer: {A}",
        {"Q", "A"}};
    return tpl;
}

inline const PromptTemplate& code_reviewer_followup() {
    static const PromptTemplate tpl{
        "Please continue to submit review comments according to the improved procedure. "
        "If you think the programmer performs well in three aspects, please just output "
        "'over' without any other output. Programmer: {A}",
        {"A"}};
    return tpl;
}

inline const PromptTemplate& code_judge() {
    static const PromptTemplate tpl{
        "You will play the role of a professional developer, and you will rate both a "
        "programmer and a reviewer based on their conversation. The main criteria are: "
        "1. Whether the code provided by the programmer meets the requirements of the "
        "problem. 2. Whether the programmer has improved the code according to the "
        "reviewer's suggestions. 3. Whether the reviewer has given reasonable and "
        "actionable feedback for improvement. Please note: 1. Points are given on a scale "
        "of 1-10. 2. You need to give not only a final grade, but also a specific basis "
        "for the grade. 3. Please reply using the following format: "
        "`{\"Programmer\":{\"evaluation\":<explain>, \"score\":<score>}, "
        "\"Reviewer\":{\"evaluation\":<explain>, \"score\":<score>}}`\n\n{dialogue}",
        {"dialogue"}};
    return tpl;
}

// --- Machine translation -------------------------------------------------

inline const PromptTemplate& mt_translator_initial() {
    static const PromptTemplate tpl{
        "You will play the role of a professional translator. Please translate the given "
        "text from {L_s} (source language) to {L_t} (target language). \n"
        "Source language text: {T_s}",
        {"L_s", "L_t", "T_s"}};
    return tpl;
}

inline const PromptTemplate& mt_proofreader_initial() {
    static const PromptTemplate tpl{
        "You will play the role of a professional translation editor. Your task is to "
        "polish the {L_t} translation provided by the translator for the given text in "
        "{L_s} (source language), making the translated content more accurate. Note that "
        "you only need to reply with the polished sentence in the target language, not "
        "any other reply.\n"
        "Source language text: {T_s}\n"
        "TRANSLATOR: {T_t}",
        {"L_s", "L_t", "T_s", "T_t"}};
    return tpl;
}

inline const PromptTemplate& mt_judge() {
    static const PromptTemplate tpl{
        "You will play the role of a translation expert, and you will rate the dialogue "
        "between the translator and the proofreader. The main criteria are: 1. Whether "
        "the translator's translation of the given text is semantically consistent with "
        "the original text. 2. Whether the proofreader's polishing result of the "
        "translator's translation is more accurate. Please note: 1. Points are given on "
        "a scale of 1-10 2. Not only do you need to give a final grade, but you also "
        "need to give a specific basis for the grade 3. Please reply using the following "
        "json format: `{\"Translator\":{\"evaluation\":<explain>, \"score\":<score>}, "
        "\"Proofreader\":{\"evaluation\":<explain>, \"score\":<score>}}`\n\n{dialogue}",
        {"dialogue"}};
    return tpl;
}

}  // namespace prompts

// Uniform lookup used by the CLI and tests: (task, role, phase) -> template.
inline const PromptTemplate& task_prompt(const std::string& task, const std::string& role,
                                         const std::string& phase) {
    using namespace prompts;
    if (task == "pgg_mode1") {
        if (phase == "initial") return pgg_mode1_initial();
        if (phase == "followup") return pgg_mode1_followup();
    } else if (task == "pgg_mode2") {
        if (phase == "initial") return pgg_mode2_initial();
        if (phase == "followup") return pgg_mode2_followup();
    } else if (task == "idiom") {
        return idiom_turn();
    } else if (task == "code_review") {
        if (role == "programmer") return phase == "initial" ? code_programmer_initial()
                                                            : code_programmer_followup();
        if (role == "reviewer") return phase == "initial" ? code_reviewer_initial()
                                                          : code_reviewer_followup();
        if (role == "judge") return code_judge();
    } else if (task == "machine_translation") {
        if (role == "translator") return mt_translator_initial();
        if (role == "proofreader") return mt_proofreader_initial();
        if (role == "judge") return mt_judge();
    }
    throw RenderError("no template for task=" + task + " role=" + role + " phase=" + phase);
}

inline std::string render_task_prompt(const std::string& task, const std::string& role,
                                      const std::string& phase,
                                      const std::map<std::string, std::string>& bindings) {
    return render_template(task_prompt(task, role, phase), bindings);
}

}  // namespace arena
