// Message pool: the append-only shared record of a run and the only
// channel between participants. Aliases anonymize backends.
#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/util.hpp"

namespace arena {

inline constexpr const char* kRefereeAlias = "referee";

struct PoolMessage {
    int round = 0;  // 0 = rule broadcast
    std::string sender;
    std::string body;
    std::set<std::string> visibility;  // aliases allowed to see this message
    int committed_at = 0;              // logical timestamp
};

class MessagePool {
public:
    explicit MessagePool(std::string run_id) : run_id_(std::move(run_id)) {}

    const std::string& run_id() const { return run_id_; }
    const std::vector<PoolMessage>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    // Single append path; entries are never mutated or removed.
    const PoolMessage& append(PoolMessage msg) {
        msg.committed_at = clock_++;
        entries_.push_back(std::move(msg));
        return entries_.back();
    }

private:
    std::string run_id_;
    std::vector<PoolMessage> entries_;
    int clock_ = 0;
};

// Anonymized participant bound to a backend. The backend link never
// appears in prompts.
struct AgentHandle {
    std::string alias;
    BackendRef ref;
    std::shared_ptr<Backend> backend;
};

using BackendFactory = std::function<std::shared_ptr<Backend>(const BackendRef&, std::uint64_t seed)>;

// Seeded, bijective alias assignment: aliases P1..PN are handed to a
// seeded permutation of the backends.
inline std::vector<AgentHandle> assign_aliases(const std::vector<BackendRef>& backends,
                                               std::uint64_t seed, const BackendFactory& factory) {
    if (backends.empty()) throw ConfigError("assign_aliases: no backends configured");
    std::set<std::string> ids;
    for (const auto& b : backends)
        if (!ids.insert(b.backend_id).second)
            throw ConfigError("assign_aliases: duplicate backend ref '" + b.backend_id + "'");

    auto perm = seeded_permutation(backends.size(), seed);
    std::vector<AgentHandle> handles;
    handles.reserve(backends.size());
    for (std::size_t k = 0; k < backends.size(); ++k) {
        const BackendRef& ref = backends[perm[k]];
        std::string alias = "P" + std::to_string(k + 1);
        // Aliases must not leak identity: reject any alias that embeds a
        // backend identifier or model string.
        for (const auto& b : backends) {
            if (contains_ci(alias, b.backend_id))
                throw ConfigError("alias '" + alias + "' collides with backend id");
            auto model = b.param("model");
            if (!model.empty() && contains_ci(alias, model))
                throw ConfigError("alias '" + alias + "' collides with model name");
        }
        handles.push_back({alias, ref, factory(ref, derive_seed(seed, perm[k] + 1))});
    }
    return handles;
}

// The messages the visibility policy grants `receiver` before it acts in
// `round`: everything addressed to it from rounds strictly before the
// current one (same-round peer messages are still behind the barrier).
inline std::vector<PoolMessage> select_visible(const MessagePool& pool,
                                               const std::string& receiver, int round,
                                               const std::set<std::string>* registered = nullptr) {
    if (registered && !registered->count(receiver))
        throw ContractError("select_visible: unknown receiver '" + receiver + "'");
    std::vector<PoolMessage> out;
    for (const auto& msg : pool.entries()) {
        if (msg.round >= round && msg.sender != receiver) continue;
        if (msg.visibility.count(receiver) || msg.sender == receiver) out.push_back(msg);
    }
    std::sort(out.begin(), out.end(), [](const PoolMessage& a, const PoolMessage& b) {
        return a.committed_at < b.committed_at;
    });
    return out;
}

}  // namespace arena
