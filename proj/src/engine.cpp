#include "evince/engine.hpp"

#include <chrono>
#include <ctime>
#include <memory>

#include "evince/errors.hpp"

namespace evince {

namespace {

std::string utc_now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

TranscriptRecord run_debate(const std::string& subject, Agent& agent_a, Agent& agent_b,
                            const DebateConfig& cfg, const LabelScale& scale,
                            const Stance& stance_a, const Stance& stance_b,
                            const EngineOptions& opts) {
    cfg.validate();
    validate_stance(stance_a, scale);
    validate_stance(stance_b, scale);

    JaccardSimilarity jaccard;
    SimilarityEvaluator& sim_eval = opts.similarity ? *opts.similarity : jaccard;

    TranscriptRecord transcript;
    transcript.subject_digest = fnv1a_hex(subject);
    transcript.stance_a = stance_a;
    transcript.stance_b = stance_b;
    transcript.config = cfg;
    transcript.created_at = utc_now_iso8601();

    double delta = cfg.delta_init;
    for (int t = 1; t <= cfg.t_max; ++t) {
        const Phase phase = phase_of(delta);
        AgentTurnContext ctx_a{subject, stance_a, delta, phase,
                               std::span<const Round>(transcript.rounds), scale, t, Side::a};
        AgentTurnContext ctx_b{subject, stance_b, delta, phase,
                               std::span<const Round>(transcript.rounds), scale, t, Side::b};

        AgentReply reply_a{Distribution::uniform(scale), "", "", std::nullopt};
        AgentReply reply_b = reply_a;
        try {
            reply_a = agent_a.propose(ctx_a);
            reply_b = agent_b.propose(ctx_b);
        } catch (const AgentError& e) {
            transcript.verdict.kind = VerdictKind::human_review;
            transcript.verdict.reason = std::string("aborted: agent failure at round ") +
                                        std::to_string(t) + " after " +
                                        std::to_string(e.attempts()) +
                                        " attempt(s): " + e.what();
            transcript.finished_at = utc_now_iso8601();
            return transcript;
        }

        Round round{t,
                    reply_a.dist,
                    reply_b.dist,
                    reply_a.argument,
                    reply_b.argument,
                    reply_a.raw,
                    reply_b.raw,
                    metrics::make_snapshot(reply_a.dist, reply_b.dist),
                    delta,
                    phase};

        if (t == 1) {
            transcript.initial_conditions =
                score_initial_conditions(reply_a.dist, reply_b.dist, cfg);
        } else {
            const Round& prev = transcript.rounds.back();
            round.sim_a = reply_a.recorded_sim
                              ? reply_a.recorded_sim
                              : std::optional<double>(
                                    sim_eval.similarity(reply_a.argument, prev.argument_a));
            round.sim_b = reply_b.recorded_sim
                              ? reply_b.recorded_sim
                              : std::optional<double>(
                                    sim_eval.similarity(reply_b.argument, prev.argument_b));
            if (sim_eval.consume_fallback_flag()) {
                round.note = "similarity: remote judge unavailable, fell back to " +
                             JaccardSimilarity().name();
            }
        }

        if (opts.crit_scorer) {
            round.crit_a = opts.crit_scorer(round.argument_a);
            round.crit_b = opts.crit_scorer(round.argument_b);
        }

        transcript.rounds.push_back(std::move(round));

        delta = next_contentiousness(delta, transcript.rounds.back().snapshot, cfg, scale.size());
        delta = novelty_override(transcript.rounds.back().sim_a, transcript.rounds.back().sim_b,
                                 cfg, delta);

        if (auto verdict = check_convergence(transcript.rounds, cfg)) {
            transcript.verdict = std::move(*verdict);
            transcript.finished_at = utc_now_iso8601();
            return transcript;
        }
    }

    // check_convergence issues the t_max verdict on the final round, so this
    // is unreachable for t_max >= 1; kept as a guard.
    transcript.verdict.kind = VerdictKind::human_review;
    transcript.verdict.reason = "no convergence within t_max rounds";
    transcript.finished_at = utc_now_iso8601();
    return transcript;
}

TranscriptRecord replay_script(const DebateScript& script, const DebateConfig& cfg,
                               const EngineOptions& opts) {
    auto shared = std::make_shared<const DebateScript>(script);
    ScriptedAgent a(shared, Side::a);
    ScriptedAgent b(shared, Side::b);
    return run_debate(script.subject, a, b, cfg, script.scale, script.stance_a, script.stance_b,
                      opts);
}

}  // namespace evince
