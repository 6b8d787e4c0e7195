// Writer-editor interaction state shared by code review and machine
// translation: artifact versions, editor notes, consensus detection.
#pragma once

#include <string>
#include <vector>

#include "arena/util.hpp"

namespace arena {

inline constexpr const char* kTerminationToken = "over";

enum class ConsensusReason { None, TerminationToken, MaxExchanges };

struct WriterEditorState {
    std::string task_prompt;  // coding requirement, or source text + target language
    std::vector<std::string> artifact_versions;
    std::vector<std::string> editor_notes;
    bool consensus = false;
    ConsensusReason reason = ConsensusReason::None;
    int max_exchanges = 5;

    int exchanges() const { return static_cast<int>(editor_notes.size()); }
};

enum class WriterEditorRole { Writer, Editor };

// Applies one turn. A writer turn appends an artifact version; an editor
// turn appends a note, and the exact termination token (after trimming)
// sets consensus. Hitting max_exchanges forces consensus.
inline WriterEditorState writer_editor_step(WriterEditorState state, const std::string& incoming,
                                            WriterEditorRole speaker) {
    if (state.consensus)
        throw ContractError("writer_editor_step: consensus already reached");
    if (speaker == WriterEditorRole::Writer) {
        state.artifact_versions.push_back(incoming);
        return state;
    }
    if (state.artifact_versions.empty())
        throw ContractError("writer_editor_step: editor turn before any artifact");
    if (trim(incoming) == kTerminationToken) {
        state.consensus = true;
        state.reason = ConsensusReason::TerminationToken;
        return state;
    }
    state.editor_notes.push_back(incoming);
    if (state.exchanges() >= state.max_exchanges) {
        state.consensus = true;
        state.reason = ConsensusReason::MaxExchanges;
    }
    return state;
}

}  // namespace arena
