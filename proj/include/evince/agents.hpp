#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evince/label_scale.hpp"
#include "evince/protocol.hpp"

namespace evince {

enum class StancePosition { support, oppose };

const char* to_string(StancePosition p);
StancePosition stance_position_from_string(const std::string& s);

/// One side's assignment: defend the original label, or argue alternatives.
struct Stance {
    StancePosition position = StancePosition::support;
    std::string target_label;  // must exist in the active scale
    std::string description;

    bool operator==(const Stance& other) const = default;
};

void validate_stance(const Stance& stance, const LabelScale& scale);

enum class Side { a, b };

/// Everything an agent sees before proposing: the subject, its stance, the
/// contentiousness in effect, and all prior rounds (both sides).
struct AgentTurnContext {
    std::string subject;
    Stance stance;
    double delta = 0.9;
    Phase phase = Phase::exploration;
    std::span<const Round> history;
    LabelScale scale = LabelScale::bias_five_point();
    int round_index = 1;
    Side side = Side::a;
};

struct AgentReply {
    Distribution dist;
    std::string argument;
    std::string raw;  // unparsed output, retained verbatim
    // Replay scripts may carry a pre-recorded similarity vs the agent's
    // previous-round argument; live agents leave this empty and the engine
    // computes one.
    std::optional<double> recorded_sim;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual AgentReply propose(const AgentTurnContext& ctx) = 0;
    virtual std::string name() const = 0;
};

// --- scripted agents -------------------------------------------------------

struct ScriptEntry {
    std::vector<double> probs;
    std::string argument;
    std::optional<double> sim;
};

struct ScriptRound {
    ScriptEntry a;
    ScriptEntry b;
};

/// A recorded debate: per-round distributions and arguments for both sides.
/// With hold_after_end, agents keep repeating their final entry once the
/// script runs out instead of failing.
struct DebateScript {
    std::string subject;
    LabelScale scale = LabelScale::bias_five_point();
    Stance stance_a;
    Stance stance_b;
    bool hold_after_end = false;
    std::vector<ScriptRound> rounds;

    DebateScript truncated(std::size_t n_rounds) const;
};

/// Deterministic replay of one side of a DebateScript.
class ScriptedAgent : public Agent {
public:
    ScriptedAgent(std::shared_ptr<const DebateScript> script, Side side);

    AgentReply propose(const AgentTurnContext& ctx) override;
    std::string name() const override;

private:
    std::shared_ptr<const DebateScript> script_;
    Side side_;
};

// --- prompt rendering -------------------------------------------------------

/// Text template with {placeholder} slots. Rendering with a binding map
/// throws TemplateError if the template names a placeholder with no binding.
class PromptTemplate {
public:
    explicit PromptTemplate(std::string text);
    static PromptTemplate load(const std::filesystem::path& path);
    static PromptTemplate built_in();

    std::string render(const std::map<std::string, std::string>& bindings) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// Tone directive for the given contentiousness level, from fully
/// confrontational down to fully conciliatory.
std::string contentiousness_directive(double delta);

/// Compact rendering of prior rounds from this agent's point of view.
/// Empty for round 1.
std::string history_digest(std::span<const Round> history, Side side);

/// The output contract the agents are held to: one "<label>: <percent>%"
/// line per label, then an "Argument:" section.
std::string format_instructions(const LabelScale& scale);

/// Fills the template from the turn context. The stance is restated on
/// every round; the rendered text always carries the marker line
/// "Your assigned stance (restated):".
std::string render_prompt(const AgentTurnContext& ctx, const PromptTemplate& tmpl);

// --- distribution parsing ---------------------------------------------------

/// Extracts one probability per scale label from free-form model output.
/// Label-name matching is tried first, positional number extraction second;
/// percentages and fractions are both accepted. Vectors off the simplex by
/// up to 10% are renormalized; anything else raises ParseError.
Distribution parse_distribution(const std::string& raw, const LabelScale& scale);

/// Canonical labeled-percentage rendering, the inverse of
/// parse_distribution's label-name path.
std::string format_distribution(const Distribution& dist);

// --- argument similarity ----------------------------------------------------

class SimilarityEvaluator {
public:
    virtual ~SimilarityEvaluator() = default;
    virtual double similarity(const std::string& a, const std::string& b) = 0;
    virtual std::string name() const = 0;
    /// True when the last call degraded to a fallback path (remote judges).
    virtual bool consume_fallback_flag() { return false; }
};

/// Token-set Jaccard over lowercased alphanumeric tokens. Two empty texts
/// count as identical.
double jaccard_similarity(const std::string& a, const std::string& b);

class JaccardSimilarity : public SimilarityEvaluator {
public:
    double similarity(const std::string& a, const std::string& b) override {
        return jaccard_similarity(a, b);
    }
    std::string name() const override { return "jaccard"; }
};

}  // namespace evince
