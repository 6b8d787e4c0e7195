// Per-run event transcript: line-delimited self-describing records with
// stable field ordering, so replays can be compared byte-for-byte.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/util.hpp"

namespace arena {

class Transcript {
public:
    using Event = nlohmann::ordered_json;

    explicit Transcript(std::string run_id) : run_id_(std::move(run_id)) {}

    const std::string& run_id() const { return run_id_; }
    const std::vector<Event>& events() const { return events_; }

    // Every record carries (event, run_id, round, ts) first, extra fields
    // after, in insertion order.
    void emit(const std::string& event, int round, Event fields = Event::object()) {
        Event record;
        record["event"] = event;
        record["run_id"] = run_id_;
        record["round"] = round;
        record["ts"] = ts_++;
        for (auto& [key, value] : fields.items()) record[key] = std::move(value);
        events_.push_back(std::move(record));
    }

    bool has_event(const std::string& name) const {
        for (const auto& e : events_)
            if (e.at("event") == name) return true;
        return false;
    }

    std::vector<Event> events_of(const std::string& name) const {
        std::vector<Event> out;
        for (const auto& e : events_)
            if (e.at("event") == name) out.push_back(e);
        return out;
    }

    std::string to_jsonl() const {
        std::string out;
        for (const auto& e : events_) out += e.dump() + "\n";
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write transcript: " + path);
        f << to_jsonl();
    }

    static Transcript load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("cannot read transcript: " + path);
        Transcript t("");
        std::string line;
        while (std::getline(f, line)) {
            if (trim(line).empty()) continue;
            auto e = Event::parse(line, nullptr, /*allow_exceptions=*/false);
            if (e.is_discarded()) throw Error("corrupt transcript line in " + path);
            if (t.run_id_.empty() && e.contains("run_id")) t.run_id_ = e["run_id"];
            t.events_.push_back(std::move(e));
        }
        t.ts_ = static_cast<int>(t.events_.size());
        return t;
    }

private:
    std::string run_id_;
    std::vector<Event> events_;
    int ts_ = 0;
};

}  // namespace arena
