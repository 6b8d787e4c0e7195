// Idiom solitaire: dictionary with head/tail indexes, chain state,
// validation and context rendering.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "arena/prompts.hpp"
#include "arena/util.hpp"

namespace arena {

class IdiomDictionary {
public:
    IdiomDictionary() = default;

    explicit IdiomDictionary(const std::vector<std::string>& entries) {
        for (const auto& e : entries) add(e);
    }

    void add(const std::string& idiom) {
        if (utf8_length(idiom) != 4)
            throw ConfigError("idiom must be exactly four characters: " + idiom);
        if (!idioms_.insert(idiom).second) return;
        by_head_[utf8_first(idiom)].insert(idiom);
        by_tail_[utf8_last(idiom)].insert(idiom);
    }

    bool contains(const std::string& idiom) const { return idioms_.count(idiom) > 0; }
    std::size_t size() const { return idioms_.size(); }
    const std::set<std::string>& all() const { return idioms_; }

    const std::set<std::string>& with_head(const std::string& ch) const {
        static const std::set<std::string> kEmpty;
        auto it = by_head_.find(ch);
        return it == by_head_.end() ? kEmpty : it->second;
    }

private:
    std::set<std::string> idioms_;
    std::map<std::string, std::set<std::string>> by_head_;
    std::map<std::string, std::set<std::string>> by_tail_;
};

struct IdiomChainState {
    std::vector<std::string> chain;
    std::set<std::string> used;
    std::string current_tail_char;

    static IdiomChainState seeded(const std::string& opening) {
        IdiomChainState s;
        s.chain.push_back(opening);
        s.used.insert(opening);
        s.current_tail_char = utf8_last(opening);
        return s;
    }

    void push(const std::string& idiom) {
        chain.push_back(idiom);
        used.insert(idiom);
        current_tail_char = utf8_last(idiom);
    }
};

enum class IdiomVerdict { Valid, NotAnIdiom, WrongFirstChar, Repeated };

inline std::string to_string(IdiomVerdict v) {
    switch (v) {
        case IdiomVerdict::Valid: return "valid";
        case IdiomVerdict::NotAnIdiom: return "not_an_idiom";
        case IdiomVerdict::WrongFirstChar: return "wrong_first_char";
        case IdiomVerdict::Repeated: return "repeated";
    }
    return "?";
}

// Checks, in order: dictionary membership, head/tail match, repetition.
// The first failing reason wins; invalidity is a result, not an error.
inline IdiomVerdict idiom_validate(const std::string& candidate, const IdiomChainState& state,
                                   const IdiomDictionary& dict) {
    if (state.chain.empty()) throw ContractError("idiom_validate: chain must be seeded");
    if (!dict.contains(candidate)) return IdiomVerdict::NotAnIdiom;
    if (utf8_first(candidate) != state.current_tail_char) return IdiomVerdict::WrongFirstChar;
    if (state.used.count(candidate)) return IdiomVerdict::Repeated;
    return IdiomVerdict::Valid;
}

// Turn prompt: the rule template with the chain joined by '→'.
inline std::string idiom_render_context(const IdiomChainState& state) {
    if (state.chain.empty()) throw ContractError("idiom_render_context: chain must be seeded");
    return render_template(prompts::idiom_turn(), {{"S_I", join(state.chain, "→")}});
}

// One idiom per line, UTF-8, blank lines skipped.
inline IdiomDictionary load_idiom_dictionary(const std::string& path);

}  // namespace arena

#include <fstream>

namespace arena {

inline IdiomDictionary load_idiom_dictionary(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read idiom dictionary: " + path);
    IdiomDictionary dict;
    std::string line;
    while (std::getline(f, line)) {
        auto idiom = trim(line);
        if (!idiom.empty()) dict.add(idiom);
    }
    if (dict.size() == 0) throw ConfigError("idiom dictionary is empty: " + path);
    return dict;
}

}  // namespace arena
