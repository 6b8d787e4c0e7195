// Deterministic scripted policies for desk-scale runs and tests, plus the
// backend factory mapping a BackendRef onto a concrete Backend.
#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/remote.hpp"
#include "arena/tasks/idiom.hpp"
#include "arena/tasks/pgg.hpp"
#include "arena/util.hpp"

namespace arena {

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline int count_occurrences(const std::string& haystack, const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

// The idiom chain is the text after the last turn template's trailing
// marker.
inline std::vector<std::string> chain_from_context(const std::string& context) {
    static const std::string marker = "without any other response. ";
    auto pos = context.rfind(marker);
    if (pos == std::string::npos) return {};
    std::string rest = trim(context.substr(pos + marker.size()));
    // Keep only up to the next newline: later turns (if any) follow below.
    auto nl = rest.find('\n');
    if (nl != std::string::npos) rest = trim(rest.substr(0, nl));
    return split(rest, "→");
}

}  // namespace detail

inline std::string invest_json(double coins, const std::string& reason = "scripted") {
    return "{\"reason\":\"" + reason + "\", \"coins\":" + format_coins(coins) + "}";
}

// Builds a deterministic policy from config params. Available policies:
//   pgg_constant        coins=<c>
//   pgg_seeded          coins = hash(context, seed) % 11
//   pgg_sequence        sequence=<c1,c2,...> indexed by round
//   pgg_prose_then_json coins=<c>; prose first, valid json only on re-ask
//   pgg_overinvest      coins=<c> (out of range, exercises clamping)
//   idiom_greedy        idioms=<a,b,...> or dictionary=<path>
//   idiom_resign        always an invalid reply
//   writer_simple       deterministic artifact, revision markers on re-entry
//   editor_never        always a comment, never terminates
//   editor_over         immediate termination token
//   editor_over_after   k=<n>: terminates after n artifacts seen
//   judge_fixed         json=<exact reply>  wrap=none|fenced|prose
//   echo                replies the context hash (diagnostics)
inline ScriptedBackend::Policy make_scripted_policy(
    const std::map<std::string, std::string>& params) {
    auto get = [&params](const std::string& key, const std::string& fallback = "") {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    const std::string policy = get("policy");

    if (policy == "pgg_constant") {
        double coins = std::stod(get("coins", "5"));
        return [coins](const std::string&, std::uint64_t) { return invest_json(coins); };
    }
    if (policy == "pgg_seeded") {
        return [](const std::string& context, std::uint64_t seed) {
            double coins = static_cast<double>((detail::fnv1a(context) ^ seed) % 11);
            return invest_json(coins, "seeded");
        };
    }
    if (policy == "pgg_sequence") {
        auto parts = split(get("sequence", "5"), ",");
        std::vector<double> seq;
        for (const auto& p : parts) seq.push_back(std::stod(trim(p)));
        return [seq](const std::string& context, std::uint64_t) {
            std::size_t round = static_cast<std::size_t>(
                detail::count_occurrences(context, "round starts"));
            return invest_json(seq[std::min(round, seq.size() - 1)], "sequence");
        };
    }
    if (policy == "pgg_prose_then_json") {
        // Prose on the first ask of each round; the re-ask context contains
        // the agent's own prose, which cues the valid reply.
        double coins = std::stod(get("coins", "5"));
        return [coins](const std::string& context, std::uint64_t) -> std::string {
            if (context.find("I would like to invest some coins") != std::string::npos)
                return invest_json(coins, "after reminder");
            return "I would like to invest some coins, thank you.";
        };
    }
    if (policy == "pgg_overinvest") {
        double coins = std::stod(get("coins", "25"));
        return [coins](const std::string&, std::uint64_t) { return invest_json(coins, "greedy"); };
    }
    if (policy == "idiom_greedy") {
        IdiomDictionary dict;
        if (!get("dictionary").empty()) {
            dict = load_idiom_dictionary(get("dictionary"));
        } else {
            for (const auto& idiom : split(get("idioms"), ","))
                if (!trim(idiom).empty()) dict.add(trim(idiom));
        }
        return [dict](const std::string& context, std::uint64_t) -> std::string {
            auto chain = detail::chain_from_context(context);
            if (chain.empty()) return "pass";
            std::set<std::string> used(chain.begin(), chain.end());
            for (const auto& candidate : dict.with_head(utf8_last(chain.back())))
                if (!used.count(candidate)) return candidate;
            return "pass";  // no legal continuation: concede via invalid reply
        };
    }
    if (policy == "idiom_resign") {
        return [](const std::string&, std::uint64_t) { return std::string("pass"); };
    }
    if (policy == "writer_simple") {
        return [](const std::string& context, std::uint64_t) {
            int revision = detail::count_occurrences(context, "revised solution");
            return "def solution():\n    return " + std::to_string(42 + revision) +
                   "  # revision " + std::to_string(revision);
        };
    }
    if (policy == "editor_never") {
        return [](const std::string& context, std::uint64_t) {
            int seen = detail::count_occurrences(context, "Programmer:") +
                       detail::count_occurrences(context, "TRANSLATOR:");
            return "Please tighten correctness and clarity further (pass " +
                   std::to_string(seen) + ").";
        };
    }
    if (policy == "editor_over") {
        return [](const std::string&, std::uint64_t) { return std::string("over"); };
    }
    if (policy == "editor_over_after") {
        int k = std::stoi(get("k", "2"));
        return [k](const std::string& context, std::uint64_t) -> std::string {
            int seen = detail::count_occurrences(context, "Programmer:");
            if (seen >= k) return "over";
            return "Round " + std::to_string(seen) + ": please improve the solution.";
        };
    }
    if (policy == "we_auto") {
        // Seat-aware writer/editor: pairwise role swap seats the same
        // backend on either side, so the role is read off the context.
        int k = std::stoi(get("k", "2"));
        return [k](const std::string& context, std::uint64_t) -> std::string {
            bool editing = context.find("play the role of a code reviewer") != std::string::npos ||
                           context.find("professional translation editor") != std::string::npos;
            if (editing) {
                int seen = detail::count_occurrences(context, "Programmer:") +
                           detail::count_occurrences(context, "TRANSLATOR:");
                if (seen >= k) return "over";
                return "Pass " + std::to_string(seen) + ": please refine the result.";
            }
            int revision = detail::count_occurrences(context, "revised solution");
            return "Artifact v" + std::to_string(revision) + " for the stated requirement.";
        };
    }
    if (policy == "proofreader_simple") {
        return [](const std::string&, std::uint64_t) {
            return std::string("Polished translation of the given text.");
        };
    }
    if (policy == "translator_simple") {
        return [](const std::string&, std::uint64_t) {
            return std::string("Draft translation of the given text.");
        };
    }
    if (policy == "judge_fixed") {
        std::string body = get("json",
                               "{\"Programmer\":{\"evaluation\":\"solid\", \"score\":8.5}, "
                               "\"Reviewer\":{\"evaluation\":\"useful\", \"score\":8.8}}");
        std::string wrap = get("wrap", "none");
        return [body, wrap](const std::string&, std::uint64_t) {
            if (wrap == "fenced") return "Here is my verdict:\n```json\n" + body + "\n```";
            if (wrap == "prose") return "After careful thought: " + body + " Thank you.";
            return body;
        };
    }
    if (policy == "echo") {
        return [](const std::string& context, std::uint64_t seed) {
            return "echo:" + std::to_string(detail::fnv1a(context) ^ seed);
        };
    }
    throw ConfigError("unknown scripted policy: " + policy);
}

inline std::shared_ptr<Backend> make_backend(const BackendRef& ref, std::uint64_t seed) {
    ref.validate();
    switch (ref.flavor) {
        case BackendFlavor::Scripted:
            if (ref.param("policy") == "fail") return std::make_shared<FailingBackend>();
            return std::make_shared<ScriptedBackend>(make_scripted_policy(ref.params), seed);
        case BackendFlavor::RemoteRoleMessages:
        case BackendFlavor::RemoteTagged:
            return std::make_shared<RemoteBackend>(ref);
    }
    throw ConfigError("unhandled backend flavor");
}

}  // namespace arena
