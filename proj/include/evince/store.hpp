#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evince/analysis.hpp"
#include "evince/config.hpp"
#include "evince/engine.hpp"

// Persistence and ingestion: JSON transcripts, JSON debate scripts, JSON
// configs, and the delimited article-dataset format. Layouts are documented
// in docs/formats.md.

namespace evince::store {

inline constexpr int kTranscriptSchemaVersion = 1;

nlohmann::json to_json(const TranscriptRecord& record);
TranscriptRecord transcript_from_json(const nlohmann::json& j);

/// Writes/reads a transcript at an explicit path (overwrites allowed —
/// id-addressed exclusivity lives in TranscriptStore). Loading validates
/// the schema version, non-empty rounds, and contiguous indices.
void save_transcript_file(const TranscriptRecord& record, const std::filesystem::path& path);
TranscriptRecord load_transcript_file(const std::filesystem::path& path);

/// Directory of transcripts addressed by id. Writes are exclusive: saving
/// an id that already exists is an error, never a silent overwrite.
class TranscriptStore {
public:
    explicit TranscriptStore(std::filesystem::path dir);

    /// Returns the id (generated from the record digest unless supplied).
    std::string save(const TranscriptRecord& record,
                     std::optional<std::string> id = std::nullopt);
    TranscriptRecord load(const std::string& id) const;
    std::filesystem::path path_of(const std::string& id) const;

private:
    std::filesystem::path dir_;
};

nlohmann::json to_json(const DebateScript& script);
DebateScript script_from_json(const nlohmann::json& j);
DebateScript load_debate_script(const std::filesystem::path& path);

/// Debate + optional remote-agent settings from one JSON file. Unknown
/// keys are rejected to catch typos in threshold names.
struct FileConfig {
    DebateConfig debate;
    std::optional<RemoteAgentConfig> agent;
};

FileConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const DebateConfig& cfg);

/// One article per line:
///   id|category|source|ROLE=label|...|biases=dr,ds,sr
/// with '#' comments. Diagnostics name the line and field. Duplicate ids,
/// unknown roles, and off-scale labels are errors.
std::vector<analysis::AnnotatedArticle> load_dataset(const std::filesystem::path& path,
                                                     const LabelScale& scale);

}  // namespace evince::store
