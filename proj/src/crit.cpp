#include "evince/crit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evince/errors.hpp"

namespace evince {

using nlohmann::json;

const char* to_string(ReasonKind kind) {
    switch (kind) {
        case ReasonKind::theory: return "theory";
        case ReasonKind::opinion: return "opinion";
        case ReasonKind::statistics: return "statistics";
        case ReasonKind::claim: return "claim";
    }
    return "?";
}

ReasonKind reason_kind_from_string(const std::string& s) {
    if (s == "theory") return ReasonKind::theory;
    if (s == "opinion") return ReasonKind::opinion;
    if (s == "statistics") return ReasonKind::statistics;
    if (s == "claim") return ReasonKind::claim;
    throw ValidationError("unknown reason kind: " + s);
}

bool ReasonAssessment::operator==(const ReasonAssessment& other) const {
    if (reason != other.reason || kind != other.kind || gamma != other.gamma ||
        theta != other.theta || is_rival != other.is_rival) {
        return false;
    }
    if (static_cast<bool>(sub_report) != static_cast<bool>(other.sub_report)) return false;
    return !sub_report || *sub_report == *other.sub_report;
}

bool CritReport::operator==(const CritReport& other) const {
    return claim == other.claim && supporting == other.supporting && rivals == other.rivals &&
           gamma_total == other.gamma_total && justification == other.justification;
}

double recompute_gamma(const CritReport& report) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto* group : {&report.supporting, &report.rivals}) {
        for (const auto& a : *group) {
            sum += a.gamma * (a.theta / 10.0);
            ++count;
        }
    }
    if (count == 0) throw CritError("aggregate undefined: no reasons assessed");
    return sum / static_cast<double>(count);
}

namespace {

void check_score_range(double value, const char* which, const std::string& reason) {
    if (std::isnan(value) || value < 1.0 || value > 10.0) {
        throw CritError(std::string(which) + " score " + std::to_string(value) +
                        " outside [1, 10] for reason: " + reason);
    }
}

ReasonAssessment assess(const ReasonFinding& finding, bool is_rival, CritEvaluator& evaluator,
                        int depth, const std::string& claim,
                        const std::optional<std::string>& context) {
    check_score_range(finding.gamma, "validity", finding.reason);
    check_score_range(finding.theta, "credibility", finding.reason);
    ReasonAssessment a;
    a.reason = finding.reason;
    a.kind = finding.kind;
    a.gamma = finding.gamma;
    a.theta = finding.theta;
    a.is_rival = is_rival;
    if (context) {
        if (auto adjusted = evaluator.reassess_in_context(a.reason, claim, *context)) {
            check_score_range(adjusted->first, "counterfactual validity", a.reason);
            check_score_range(adjusted->second, "counterfactual credibility", a.reason);
            a.gamma = adjusted->first;
            a.theta = adjusted->second;
        }
    }
    // Claims sourced elsewhere are examined in their own right while depth
    // remains; the sub-document's aggregate becomes this reason's validity.
    if (!is_rival && finding.kind == ReasonKind::claim && depth > 0) {
        if (auto sub_doc = evaluator.find_document(finding.reason)) {
            CritReport sub = crit_score(*sub_doc, evaluator, depth - 1);
            a.gamma = std::clamp(sub.gamma_total, 1.0, 10.0);
            a.sub_report = std::make_shared<const CritReport>(std::move(sub));
        }
    }
    return a;
}

}  // namespace

CritReport crit_score(const std::string& document, CritEvaluator& evaluator, int depth,
                      const std::optional<std::string>& counterfactual_context) {
    if (document.empty()) throw CritError("document is empty");
    if (depth < 0) throw CritError("recursion depth must be >= 0");

    CritReport report;
    report.claim = evaluator.claim_of(document);

    for (const auto& finding : evaluator.supporting_reasons(document, report.claim)) {
        report.supporting.push_back(
            assess(finding, false, evaluator, depth, report.claim, counterfactual_context));
    }
    for (const auto& finding : evaluator.rival_reasons(document, report.claim)) {
        report.rivals.push_back(
            assess(finding, true, evaluator, depth, report.claim, counterfactual_context));
    }
    if (report.supporting.empty() && report.rivals.empty()) {
        throw CritError("no supporting or rival reasons found; aggregate undefined");
    }
    report.gamma_total = recompute_gamma(report);

    std::ostringstream just;
    just << "claim: " << report.claim << " | " << report.supporting.size() << " supporting, "
         << report.rivals.size() << " rival reason(s); aggregate " << report.gamma_total
         << " on [0.1, 10]";
    report.justification = just.str();
    return report;
}

CritGate gate_arguments(const CritReport& report, double tau_crit) {
    return report.gamma_total >= tau_crit ? CritGate::pass : CritGate::flag;
}

// --- fixture evaluator -------------------------------------------------------

namespace {

ReasonFinding finding_from_json(const json& j) {
    ReasonFinding f;
    f.reason = j.at("reason").get<std::string>();
    f.kind = reason_kind_from_string(j.at("kind").get<std::string>());
    f.gamma = j.at("gamma").get<double>();
    f.theta = j.at("theta").get<double>();
    return f;
}

}  // namespace

FixtureCritEvaluator FixtureCritEvaluator::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CritError("cannot read crit fixture: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return FixtureCritEvaluator(buf.str());
}

FixtureCritEvaluator::FixtureCritEvaluator(std::string json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw CritError(std::string("crit fixture is not valid JSON: ") + e.what());
    }
    for (const auto& [id, doc] : root.at("documents").items()) {
        Entry entry;
        entry.claim = doc.at("claim").get<std::string>();
        for (const auto& r : doc.value("supporting", json::array())) {
            entry.supporting.push_back(finding_from_json(r));
            if (r.contains("doc")) {
                entry.reason_docs[entry.supporting.back().reason] = r["doc"].get<std::string>();
            }
        }
        for (const auto& r : doc.value("rivals", json::array())) {
            entry.rivals.push_back(finding_from_json(r));
        }
        docs_[id] = std::move(entry);
    }
}

std::string FixtureCritEvaluator::claim_of(const std::string& document) {
    auto it = docs_.find(document);
    if (it == docs_.end()) throw CritError("fixture has no document '" + document + "'");
    return it->second.claim;
}

std::vector<ReasonFinding> FixtureCritEvaluator::supporting_reasons(const std::string& document,
                                                                    const std::string&) {
    return docs_.at(document).supporting;
}

std::vector<ReasonFinding> FixtureCritEvaluator::rival_reasons(const std::string& document,
                                                               const std::string&) {
    return docs_.at(document).rivals;
}

std::optional<std::string> FixtureCritEvaluator::find_document(const std::string& reason) {
    for (const auto& [id, entry] : docs_) {
        auto it = entry.reason_docs.find(reason);
        if (it != entry.reason_docs.end()) return it->second;
    }
    return std::nullopt;
}

// --- remote evaluator --------------------------------------------------------

RemoteCritEvaluator::RemoteCritEvaluator(ChatClient client) : client_(std::move(client)) {}

std::string RemoteCritEvaluator::claim_of(const std::string& document) {
    try {
        return client_.complete(
            {{"system", "You analyze arguments. Answer with the requested item only."},
             {"user", "Identify the central claim of this document. Reply with the claim "
                      "statement alone.\n\n" +
                          document}});
    } catch (const AgentError& e) {
        throw CritError(std::string("claim extraction failed: ") + e.what());
    }
}

std::vector<ReasonFinding> RemoteCritEvaluator::ask_reasons(const std::string& document,
                                                            const std::string& claim,
                                                            bool rivals) {
    const std::string role = rivals ? "rival (counter)" : "supporting";
    std::string raw;
    try {
        raw = client_.complete(
            {{"system", "You analyze arguments and reply with JSON only."},
             {"user",
              "Claim: " + claim + "\n\nDocument:\n" + document + "\n\nList the " + role +
                  " reasons for this claim. Classify each reason's evidence as one of "
                  "\"theory\", \"opinion\", \"statistics\", or \"claim\" (a claim from "
                  "another source), and rate how strongly the reason supports or attacks "
                  "the claim (gamma) and the credibility of its source (theta), both 1-10. "
                  "Reply with a JSON array of objects {\"reason\", \"kind\", \"gamma\", "
                  "\"theta\"} and nothing else."}});
    } catch (const AgentError& e) {
        throw CritError(std::string("reason extraction failed: ") + e.what());
    }

    const auto open = raw.find('[');
    const auto close = raw.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw CritError("reason extraction reply carries no JSON array");
    }
    json arr;
    try {
        arr = json::parse(raw.substr(open, close - open + 1));
    } catch (const json::exception& e) {
        throw CritError(std::string("reason extraction reply is not valid JSON: ") + e.what());
    }
    std::vector<ReasonFinding> out;
    for (const auto& r : arr) {
        ReasonFinding f = finding_from_json(r);
        f.gamma = std::clamp(f.gamma, 1.0, 10.0);
        f.theta = std::clamp(f.theta, 1.0, 10.0);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<ReasonFinding> RemoteCritEvaluator::supporting_reasons(const std::string& document,
                                                                   const std::string& claim) {
    return ask_reasons(document, claim, false);
}

std::vector<ReasonFinding> RemoteCritEvaluator::rival_reasons(const std::string& document,
                                                              const std::string& claim) {
    return ask_reasons(document, claim, true);
}

}  // namespace evince
