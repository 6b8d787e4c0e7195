// Backend abstraction: scripted deterministic bots and remote chat-model
// clients, plus transcript formatting for role-message and tagged wire
// styles.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arena/util.hpp"

namespace arena {

enum class BackendFlavor { Scripted, RemoteRoleMessages, RemoteTagged };

inline std::string to_string(BackendFlavor f) {
    switch (f) {
        case BackendFlavor::Scripted: return "scripted";
        case BackendFlavor::RemoteRoleMessages: return "remote_role";
        case BackendFlavor::RemoteTagged: return "remote_tagged";
    }
    return "?";
}

inline BackendFlavor backend_flavor_from(const std::string& s) {
    if (s == "scripted") return BackendFlavor::Scripted;
    if (s == "remote_role") return BackendFlavor::RemoteRoleMessages;
    if (s == "remote_tagged") return BackendFlavor::RemoteTagged;
    throw ConfigError("unknown backend flavor: " + s);
}

struct BackendRef {
    std::string backend_id;
    BackendFlavor flavor = BackendFlavor::Scripted;
    std::map<std::string, std::string> params;

    std::string param(const std::string& key, const std::string& fallback = "") const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }

    void validate() const {
        if (backend_id.empty()) throw ConfigError("backend_id must be non-empty");
        if (flavor == BackendFlavor::RemoteTagged) {
            auto h = param("human_tag"), a = param("assistant_tag");
            if (h.empty() || a.empty() || h == a)
                throw ConfigError("remote_tagged backend '" + backend_id +
                                  "' requires distinct human_tag and assistant_tag");
        }
    }
};

struct ChatTurn {
    enum class Speaker { SelfAgent, Other };
    Speaker speaker = Speaker::Other;
    std::string text;
};

// Wire form of a conversation: either an ordered role/content list or a
// single tagged string ending with the assistant tag to elicit a reply.
struct WirePayload {
    bool tagged = false;
    std::vector<std::pair<std::string, std::string>> messages;  // {role, content}
    std::string tagged_text;

    // Flat view used by scripted policies and anonymity scans.
    std::string flattened() const {
        if (tagged) return tagged_text;
        std::string out;
        for (const auto& [role, content] : messages) {
            if (!out.empty()) out += "\n";
            out += content;
        }
        return out;
    }
};

inline WirePayload format_context(const std::vector<ChatTurn>& history, BackendFlavor flavor,
                                  const std::map<std::string, std::string>& params) {
    if (history.empty()) throw ContractError("format_context: empty history");
    WirePayload payload;
    if (flavor == BackendFlavor::RemoteTagged) {
        auto it_h = params.find("human_tag");
        auto it_a = params.find("assistant_tag");
        if (it_h == params.end() || it_a == params.end())
            throw ContractError("format_context: tagged flavor needs human_tag/assistant_tag");
        payload.tagged = true;
        for (const auto& turn : history) {
            payload.tagged_text +=
                (turn.speaker == ChatTurn::Speaker::SelfAgent ? it_a->second : it_h->second);
            payload.tagged_text += " " + turn.text;
        }
        payload.tagged_text += it_a->second;  // trailing tag elicits the reply
    } else {
        for (const auto& turn : history)
            payload.messages.emplace_back(
                turn.speaker == ChatTurn::Speaker::SelfAgent ? "assistant" : "user", turn.text);
    }
    return payload;
}

// Inverse of the tagged encoding, valid whenever turn texts contain
// neither tag. The trailing bare assistant tag is dropped.
inline std::vector<ChatTurn> parse_tagged(const std::string& wire, const std::string& human_tag,
                                          const std::string& assistant_tag) {
    std::vector<ChatTurn> turns;
    std::size_t pos = 0;
    while (pos < wire.size()) {
        bool is_self;
        if (wire.compare(pos, human_tag.size(), human_tag) == 0) {
            is_self = false;
            pos += human_tag.size();
        } else if (wire.compare(pos, assistant_tag.size(), assistant_tag) == 0) {
            is_self = true;
            pos += assistant_tag.size();
        } else {
            throw ContractError("parse_tagged: expected a tag at position " + std::to_string(pos));
        }
        auto next_h = wire.find(human_tag, pos);
        auto next_a = wire.find(assistant_tag, pos);
        auto end = std::min(next_h, next_a);
        std::string text = wire.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        if (!text.empty() && text.front() == ' ') text.erase(0, 1);
        pos = end == std::string::npos ? wire.size() : end;
        if (text.empty() && pos >= wire.size() && is_self) break;  // trailing elicitation tag
        turns.push_back({is_self ? ChatTurn::Speaker::SelfAgent : ChatTurn::Speaker::Other, text});
    }
    return turns;
}

struct RetryBudget {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{100};
};

class Backend {
public:
    virtual ~Backend() = default;
    // Raw reply text; throws BackendError on a (retriable) failure.
    virtual std::string complete(const WirePayload& payload) = 0;
};

// Deterministic test double. Replies are a pure function of (flattened
// context, seed); every payload shown is recorded for the barrier and
// anonymity checks.
class ScriptedBackend : public Backend {
public:
    using Policy = std::function<std::string(const std::string& context, std::uint64_t seed)>;

    ScriptedBackend(Policy policy, std::uint64_t seed) : policy_(std::move(policy)), seed_(seed) {}

    std::string complete(const WirePayload& payload) override {
        std::string context = payload.flattened();
        {
            std::lock_guard<std::mutex> lock(mu_);
            seen_.push_back(context);
        }
        return policy_(context, seed_);
    }

    std::vector<std::string> seen_contexts() const {
        std::lock_guard<std::mutex> lock(mu_);
        return seen_;
    }

private:
    Policy policy_;
    std::uint64_t seed_;
    mutable std::mutex mu_;
    std::vector<std::string> seen_;
};

// Always fails; exercises the retry/abort path.
class FailingBackend : public Backend {
public:
    std::string complete(const WirePayload&) override {
        ++attempts_;
        throw BackendError("scripted failure");
    }
    int attempts() const { return attempts_; }

private:
    std::atomic<int> attempts_{0};
};

// Issues the call with bounded retries and exponential backoff; surfaces a
// BackendError once the budget is exhausted. `log` (optional) receives one
// record per attempt with payload and reply or error.
inline std::string query(Backend& backend, const WirePayload& payload, const RetryBudget& budget,
                         const std::function<void(const nlohmann::ordered_json&)>& log = {}) {
    auto backoff = budget.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= budget.max_attempts; ++attempt) {
        try {
            std::string reply = backend.complete(payload);
            if (log)
                log({{"attempt", attempt}, {"payload", payload.flattened()}, {"reply", reply}});
            return reply;
        } catch (const BackendError& e) {
            last_error = e.what();
            if (log)
                log({{"attempt", attempt}, {"payload", payload.flattened()}, {"error", last_error}});
            if (attempt < budget.max_attempts) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
        }
    }
    throw BackendError("backend failed after " + std::to_string(budget.max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace arena
