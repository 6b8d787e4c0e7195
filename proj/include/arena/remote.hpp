// Remote chat-completion backend over HTTP. Adapter behavior (endpoint,
// body shape, reply extraction path) is config-driven.
#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "arena/agents.hpp"

namespace arena {

// Talks to a chat-completions style endpoint. Params:
//   endpoint       http://host:port            (required)
//   path           request path                (default /v1/chat/completions)
//   model          model name sent in the body
//   api_key_env    env var holding the bearer token (optional)
//   reply_path     JSON pointer to the reply text
//                  (default /choices/0/message/content)
//   timeout_ms     per-call timeout            (default 30000)
//   temperature    sampling temperature        (default 0, determinism first)
class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(BackendRef ref) : ref_(std::move(ref)) {
        ref_.validate();
        endpoint_ = ref_.param("endpoint");
        if (endpoint_.empty())
            throw ConfigError("remote backend '" + ref_.backend_id + "' missing endpoint");
        path_ = ref_.param("path", "/v1/chat/completions");
        reply_path_ = ref_.param("reply_path", "/choices/0/message/content");
        timeout_ms_ = std::stoi(ref_.param("timeout_ms", "30000"));
    }

    std::string complete(const WirePayload& payload) override {
        nlohmann::json body;
        if (!ref_.param("model").empty()) body["model"] = ref_.param("model");
        body["temperature"] = std::stod(ref_.param("temperature", "0"));
        if (payload.tagged) {
            body["prompt"] = payload.tagged_text;
        } else {
            auto& msgs = body["messages"] = nlohmann::json::array();
            for (const auto& [role, content] : payload.messages)
                msgs.push_back({{"role", role}, {"content", content}});
        }

        httplib::Client client(endpoint_);
        client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
        client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

        httplib::Headers headers;
        const std::string key_env = ref_.param("api_key_env");
        if (!key_env.empty()) {
            const char* key = std::getenv(key_env.c_str());
            if (!key)
                throw BackendError("credential env var not set: " + key_env);
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) throw BackendError("transport failure reaching " + endpoint_);
        if (res->status < 200 || res->status >= 300)
            throw BackendError("non-success status " + std::to_string(res->status) + " from " +
                               endpoint_);

        auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) throw BackendError("unparseable response body");
        auto ptr = nlohmann::json::json_pointer(reply_path_);
        if (!parsed.contains(ptr) || !parsed.at(ptr).is_string())
            throw BackendError("reply_path " + reply_path_ + " missing in response");
        return parsed.at(ptr).get<std::string>();
    }

private:
    BackendRef ref_;
    std::string endpoint_;
    std::string path_;
    std::string reply_path_;
    int timeout_ms_ = 30000;
};

}  // namespace arena
