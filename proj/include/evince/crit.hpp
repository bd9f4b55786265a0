#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evince/chat_client.hpp"

// Argument-quality scoring: extract a claim and its supporting/rival
// reasons, score each reason's validity (gamma) and source credibility
// (theta) on [1, 10], recurse into reasons that are themselves claims from
// other sources, and aggregate into a single quality score on [0.1, 10].

namespace evince {

enum class ReasonKind { theory, opinion, statistics, claim };

const char* to_string(ReasonKind kind);
ReasonKind reason_kind_from_string(const std::string& s);

struct CritReport;

struct ReasonAssessment {
    std::string reason;
    ReasonKind kind = ReasonKind::opinion;
    double gamma = 1.0;  // argument validity, [1, 10]
    double theta = 1.0;  // source credibility, [1, 10]
    bool is_rival = false;
    // Present only when kind == claim and recursion depth remained.
    std::shared_ptr<const CritReport> sub_report;

    bool operator==(const ReasonAssessment& other) const;
};

struct CritReport {
    std::string claim;
    std::vector<ReasonAssessment> supporting;
    std::vector<ReasonAssessment> rivals;
    // sum(gamma * theta/10) / |supporting + rivals|, kept on the [0.1, 10]
    // scale by the theta/10 rescaling.
    double gamma_total = 0.0;
    std::string justification;

    bool operator==(const CritReport& other) const;
};

/// Recomputes the aggregate from the stored assessments (the report
/// self-consistency invariant).
double recompute_gamma(const CritReport& report);

struct ReasonFinding {
    std::string reason;
    ReasonKind kind = ReasonKind::opinion;
    double gamma = 1.0;
    double theta = 1.0;
};

/// Supplies claim extraction, reason extraction, rival-reason generation,
/// and scoring — either fixture-backed (offline tests) or remote-model
/// backed.
class CritEvaluator {
public:
    virtual ~CritEvaluator() = default;
    virtual std::string claim_of(const std::string& document) = 0;
    virtual std::vector<ReasonFinding> supporting_reasons(const std::string& document,
                                                          const std::string& claim) = 0;
    virtual std::vector<ReasonFinding> rival_reasons(const std::string& document,
                                                     const std::string& claim) = 0;
    /// Resolves a claim-kind reason to the document backing it, enabling
    /// recursion. Default: no document available.
    virtual std::optional<std::string> find_document(const std::string& reason) {
        (void)reason;
        return std::nullopt;
    }
    /// Optional counterfactual hook: re-assess a reason-to-claim link under
    /// an alternative context. Off by default; evaluators that support it
    /// return the adjusted (gamma, theta).
    virtual std::optional<std::pair<double, double>> reassess_in_context(
        const std::string& reason, const std::string& claim, const std::string& context) {
        (void)reason;
        (void)claim;
        (void)context;
        return std::nullopt;
    }
};

/// Scores a document. Recursion happens only for claim-kind reasons while
/// depth > 0 (decrementing); the sub-report's aggregate replaces the
/// reason's validity score. Rival reasons are always solicited. An empty
/// combined reason set is an error (the aggregate would be undefined).
/// When a counterfactual context is given, each reason is re-assessed
/// through the evaluator's reassess_in_context hook.
CritReport crit_score(const std::string& document, CritEvaluator& evaluator, int depth = 2,
                      const std::optional<std::string>& counterfactual_context = std::nullopt);

enum class CritGate { pass, flag };

/// Pass iff the aggregate reaches tau_crit (boundary inclusive); Flag
/// routes the report to the human-review queue.
CritGate gate_arguments(const CritReport& report, double tau_crit);

/// Fixture-backed evaluator: a JSON file maps document ids to their claim,
/// scored supporting reasons, and scored rivals (see docs/formats.md).
/// Documents are addressed by id.
class FixtureCritEvaluator : public CritEvaluator {
public:
    static FixtureCritEvaluator load(const std::filesystem::path& path);
    explicit FixtureCritEvaluator(std::string json_text);

    std::string claim_of(const std::string& document) override;
    std::vector<ReasonFinding> supporting_reasons(const std::string& document,
                                                  const std::string& claim) override;
    std::vector<ReasonFinding> rival_reasons(const std::string& document,
                                             const std::string& claim) override;
    std::optional<std::string> find_document(const std::string& reason) override;

private:
    struct Entry {
        std::string claim;
        std::vector<ReasonFinding> supporting;
        std::vector<ReasonFinding> rivals;
        std::map<std::string, std::string> reason_docs;  // reason text -> doc id
    };
    std::map<std::string, Entry> docs_;
};

/// Remote-model evaluator speaking the chat-completion contract.
class RemoteCritEvaluator : public CritEvaluator {
public:
    explicit RemoteCritEvaluator(ChatClient client);

    std::string claim_of(const std::string& document) override;
    std::vector<ReasonFinding> supporting_reasons(const std::string& document,
                                                  const std::string& claim) override;
    std::vector<ReasonFinding> rival_reasons(const std::string& document,
                                             const std::string& claim) override;

private:
    std::vector<ReasonFinding> ask_reasons(const std::string& document, const std::string& claim,
                                           bool rivals);
    ChatClient client_;
};

}  // namespace evince
