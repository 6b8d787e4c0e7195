// Extraction of the first balanced JSON object embedded in model output.
// Replies arrive wrapped in prose, code fences, or both; this scanner is
// shared by the investment parser and the judge-verdict parser.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace arena {

// Finds the first balanced top-level {...} region and parses it. Brace
// counting honors string literals and escapes; a candidate that fails to
// parse is skipped and scanning resumes after its opening brace. Returns
// nullopt when no parseable object exists. Never throws on arbitrary bytes.
inline std::optional<nlohmann::json> extract_json_object(std::string_view reply) {
    std::size_t start = 0;
    while ((start = reply.find('{', start)) != std::string_view::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < reply.size(); ++i) {
            char c = reply[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    auto candidate = reply.substr(start, i - start + 1);
                    auto parsed = nlohmann::json::parse(candidate, nullptr,
                                                        /*allow_exceptions=*/false);
                    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                    break;  // malformed candidate, look for a later brace
                }
            }
        }
        ++start;
    }
    return std::nullopt;
}

}  // namespace arena
