#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <thread>

#include "evince/engine.hpp"
#include "evince/errors.hpp"
#include "evince/protocol.hpp"
#include "evince/store.hpp"
#include "oracles.hpp"

using namespace evince;

namespace {

const LabelScale kScale = LabelScale::bias_five_point();

Distribution dist(std::vector<double> p) { return Distribution(kScale, std::move(p)); }

DebateScript load_fixture_script() {
    return store::load_debate_script(std::string(EVINCE_FIXTURE_DIR) + "/appendix_f.json");
}

Round make_round(int index, Distribution a, Distribution b, std::optional<double> sim_a,
                 std::optional<double> sim_b) {
    Round r{index, a, b, "arg a " + std::to_string(index), "arg b " + std::to_string(index),
            "", "", metrics::make_snapshot(a, b), 0.5, Phase::integration};
    r.sim_a = sim_a;
    r.sim_b = sim_b;
    return r;
}

}  // namespace

TEST_CASE("phase bands partition [0,1] with the quoted boundaries") {
    CHECK(phase_of(0.9) == Phase::exploration);
    CHECK(phase_of(0.7) == Phase::integration);  // 0.7 is not > 0.7
    CHECK(phase_of(0.71) == Phase::exploration);
    CHECK(phase_of(0.3) == Phase::consensus);    // delta <= 0.3
    CHECK(phase_of(0.31) == Phase::integration);
    CHECK(phase_of(0.0) == Phase::consensus);
    CHECK(phase_of(1.0) == Phase::exploration);
    CHECK_THROWS_AS(phase_of(1.1), ValidationError);
    CHECK_THROWS_AS(phase_of(-0.01), ValidationError);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double d = u(rng);
        const Phase p = phase_of(d);
        const bool exploration = d > 0.7;
        const bool integration = d > 0.3 && d <= 0.7;
        const bool consensus = d <= 0.3;
        CHECK(((p == Phase::exploration) == exploration));
        CHECK(((p == Phase::integration) == integration));
        CHECK(((p == Phase::consensus) == consensus));
    }
}

TEST_CASE("scheduled contentiousness divides and stays in range") {
    DebateConfig cfg;
    cfg.delta_decay = 3.0;
    const auto snap = metrics::make_snapshot(dist({0.05, 0.15, 0.50, 0.25, 0.05}),
                                             dist({0.10, 0.10, 0.25, 0.35, 0.20}));
    CHECK(next_contentiousness(0.9, snap, cfg, 5) == doctest::Approx(0.3));

    cfg.delta_decay = 2.08;
    double delta = cfg.delta_init;
    for (int i = 0; i < 40; ++i) {
        const double next = next_contentiousness(delta, snap, cfg, 5);
        CHECK(next < delta);
        CHECK(next >= 0.0);
        CHECK(next <= 1.0);
        delta = next;
    }
    // Four rounds land near 0.1 under the default decay.
    CHECK(0.9 / std::pow(2.08, 3) == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("metric-driven contentiousness evaluates the weighted normalized sum") {
    DebateConfig cfg;
    cfg.delta_mode = DeltaMode::metric_driven;

    SUBCASE("all metrics zero gives zero") {
        const auto p = dist({0.05, 0.10, 0.30, 0.35, 0.20});
        CHECK(next_contentiousness(0.9, metrics::make_snapshot(p, p), cfg, 5) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("recorded round-1 snapshot with default normalizers") {
        const auto snap = metrics::make_snapshot(dist({0.05, 0.15, 0.50, 0.25, 0.05}),
                                                 dist({0.10, 0.10, 0.25, 0.35, 0.20}));
        // Frozen by direct formula evaluation: (KL/33.2193 + JS/1 + 0.45/4)/3.
        CHECK(next_contentiousness(0.9, snap, cfg, 5) ==
              doctest::Approx(0.0677402097848156).epsilon(1e-9));
    }
}

TEST_CASE("novelty override reduces contentiousness only when both agents repeat themselves") {
    DebateConfig cfg;
    cfg.tau_sim = 0.9;
    cfg.delta_decay = 1.5;
    CHECK(novelty_override(0.95, 0.92, cfg, 0.6) == doctest::Approx(0.4));
    CHECK(novelty_override(0.2, 0.9, cfg, 0.6) == 0.6);   // one agent still novel
    CHECK(novelty_override(0.0, 0.0, cfg, 0.6) == 0.6);
    CHECK(novelty_override(std::nullopt, 0.95, cfg, 0.6) == 0.6);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double sa = u(rng), sb = u(rng), d = u(rng);
        const double out = novelty_override(sa, sb, cfg, d);
        if (std::min(sa, sb) > cfg.tau_sim) {
            CHECK(out == doctest::Approx(d / cfg.delta_decay));
        } else {
            CHECK(out == d);
        }
    }
}

TEST_CASE("initial-condition scoring is advisory and threshold-driven") {
    DebateConfig cfg;
    SUBCASE("extreme high/low entropy pairing satisfies the condition") {
        const auto s = score_initial_conditions(Distribution::uniform(kScale),
                                                Distribution::point_mass(kScale, 0), cfg);
        CHECK(s.entropy_gap == doctest::Approx(2.321928094887362));
        CHECK(s.dual_entropy_satisfied);
    }
    SUBCASE("identical openings do not") {
        const auto p = dist({0.05, 0.15, 0.50, 0.25, 0.05});
        const auto s = score_initial_conditions(p, p, cfg);
        CHECK(s.entropy_gap == 0.0);
        CHECK(s.wd == 0.0);
        CHECK(!s.dual_entropy_satisfied);
    }
    SUBCASE("recorded round-1 pair") {
        const auto s = score_initial_conditions(dist({0.05, 0.15, 0.50, 0.25, 0.05}),
                                                dist({0.10, 0.10, 0.25, 0.35, 0.20}), cfg);
        CHECK(s.wd == doctest::Approx(0.45));
        // Entropy gap 2.1589 - 1.8427 = 0.3161 bits: below the default 0.5.
        CHECK(s.entropy_gap == doctest::Approx(0.3161341998316929).epsilon(1e-9));
        CHECK(!s.dual_entropy_satisfied);
    }
}

TEST_CASE("check_convergence: streaks, caps, and malformed histories") {
    DebateConfig cfg;  // defaults: k=2, t_max=10

    const auto held = dist({0.05, 0.10, 0.30, 0.35, 0.20});

    SUBCASE("single round with k=2 continues") {
        std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt)};
        CHECK(!check_convergence(history, cfg));
    }
    SUBCASE("two identical stable rounds converge at round k") {
        std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt),
                                   make_round(2, held, held, 1.0, 1.0)};
        const auto verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::converged);
        REQUIRE(verdict->consensus);
        CHECK(verdict->consensus->probs() == held.probs());
    }
    SUBCASE("t_max cap yields human review") {
        cfg.t_max = 3;
        const auto a = dist({0.9, 0.1, 0.0, 0.0, 0.0});
        const auto b = dist({0.0, 0.0, 0.0, 0.1, 0.9});
        std::vector<Round> history{make_round(1, a, b, std::nullopt, std::nullopt),
                                   make_round(2, a, b, 0.1, 0.1),
                                   make_round(3, a, b, 0.1, 0.1)};
        const auto verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::human_review);
        CHECK(!verdict->consensus);
    }
    SUBCASE("index gaps are a protocol error") {
        std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt),
                                   make_round(3, held, held, 1.0, 1.0)};
        CHECK_THROWS_AS(check_convergence(history, cfg), ProtocolError);
    }
    SUBCASE("empty history is a protocol error") {
        std::vector<Round> history;
        CHECK_THROWS_AS(check_convergence(history, cfg), ProtocolError);
    }
    SUBCASE("crit gate flips an otherwise converged window to human review") {
        cfg.crit_gate = true;
        std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt),
                                   make_round(2, held, held, 1.0, 1.0)};
        auto verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::human_review);  // scores absent while gate is on

        history[0].crit_a = history[0].crit_b = 8.0;
        history[1].crit_a = 7.0;
        history[1].crit_b = 5.0;  // below tau_crit=6
        verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::human_review);

        history[1].crit_b = 6.0;  // boundary is inclusive
        verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::converged);
    }
    SUBCASE("kl proxy bound gates convergence when configured") {
        cfg.kl_proxy_bound = 1e-12;
        // Two one-sided rounds whose proxy is tiny but nonzero would fail;
        // identical rounds have proxy ~0 under smoothing and pass.
        std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt),
                                   make_round(2, held, held, 1.0, 1.0)};
        const auto verdict = check_convergence(history, cfg);
        REQUIRE(verdict);
        CHECK(verdict->kind == VerdictKind::converged);
    }
}

TEST_CASE("replaying the recorded debate converges to the recorded consensus") {
    const DebateScript script = load_fixture_script();
    DebateConfig cfg;  // spec defaults

    const TranscriptRecord t = replay_script(script, cfg);

    // The four recorded rounds, then two consensus-hold rounds to satisfy
    // the k=2 fully-stable window.
    REQUIRE(t.rounds.size() == 6);
    CHECK(t.rounds[0].snapshot.wd == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(t.rounds[1].snapshot.wd == doctest::Approx(0.47).epsilon(1e-12));
    CHECK(t.rounds[2].snapshot.wd == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(t.rounds[3].snapshot.wd == 0.0);
    CHECK(std::abs(t.rounds[0].snapshot.kl_ab - 0.316) < 0.001);
    CHECK(std::abs(t.rounds[1].snapshot.kl_ab - 0.226) < 0.001);
    CHECK(std::abs(t.rounds[2].snapshot.kl_ab - 0.016) < 0.001);
    CHECK(std::abs(t.rounds[0].snapshot.jsd - 0.081) < 0.001);
    CHECK(std::abs(t.rounds[1].snapshot.jsd - 0.056) < 0.001);
    CHECK(std::abs(t.rounds[2].snapshot.jsd - 0.004) < 0.002);

    CHECK(t.verdict.kind == VerdictKind::converged);
    REQUIRE(t.verdict.consensus);
    const std::vector<double> expected{0.05, 0.10, 0.30, 0.35, 0.20};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK((*t.verdict.consensus)[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    // Hold rounds repeat the final argument, so computed similarity is 1.
    CHECK(t.rounds[4].sim_a == doctest::Approx(1.0));
    CHECK(t.rounds[5].sim_b == doctest::Approx(1.0));

    // Scheduled delta trace is strictly decreasing.
    for (std::size_t i = 1; i < t.rounds.size(); ++i) {
        CHECK(t.rounds[i].delta < t.rounds[i - 1].delta);
    }
    CHECK(t.rounds[0].delta == doctest::Approx(0.9));
    CHECK(t.initial_conditions.has_value());
}

TEST_CASE("truncated replay runs to the round cap and defers to human review") {
    DebateScript script = load_fixture_script().truncated(3);
    DebateConfig cfg;
    cfg.t_max = 3;

    const TranscriptRecord t = replay_script(script, cfg);
    CHECK(t.rounds.size() == 3);
    CHECK(t.verdict.kind == VerdictKind::human_review);
    CHECK(!t.verdict.consensus);
}

TEST_CASE("agents that never move hit the cap") {
    DebateScript script;
    script.subject = "static";
    script.scale = kScale;
    script.stance_a = {StancePosition::support, "neutral", ""};
    script.stance_b = {StancePosition::oppose, "neutral", ""};
    script.hold_after_end = true;
    ScriptRound r;
    r.a = {{0.9, 0.1, 0.0, 0.0, 0.0}, "immovable position a", std::nullopt};
    r.b = {{0.0, 0.0, 0.0, 0.1, 0.9}, "immovable position b", std::nullopt};
    script.rounds = {r};

    DebateConfig cfg;
    cfg.t_max = 5;
    const TranscriptRecord t = replay_script(script, cfg);
    CHECK(t.rounds.size() == 5);
    CHECK(t.verdict.kind == VerdictKind::human_review);
}

TEST_CASE("script exhaustion without hold aborts into human review") {
    DebateScript script = load_fixture_script();
    script.hold_after_end = false;
    DebateConfig cfg;  // t_max 10 > 4 scripted rounds

    const TranscriptRecord t = replay_script(script, cfg);
    CHECK(t.rounds.size() == 4);
    CHECK(t.verdict.kind == VerdictKind::human_review);
    CHECK(t.verdict.reason.find("aborted") != std::string::npos);
}

TEST_CASE("identical scripted agents converge at round k") {
    DebateScript script;
    script.subject = "agreed";
    script.scale = kScale;
    script.stance_a = {StancePosition::support, "neutral", ""};
    script.stance_b = {StancePosition::oppose, "neutral", ""};
    ScriptRound r;
    r.a = {{0.05, 0.10, 0.30, 0.35, 0.20}, "same text", std::nullopt};
    r.b = {{0.05, 0.10, 0.30, 0.35, 0.20}, "same text", std::nullopt};
    script.rounds = {r, r, r};

    DebateConfig cfg;
    const TranscriptRecord t = replay_script(script, cfg);
    CHECK(t.rounds.size() == 2);  // k = 2
    CHECK(t.verdict.kind == VerdictKind::converged);
}

TEST_CASE("consensus mean is a valid distribution for random finals") {
    std::mt19937 rng(4242);
    for (int i = 0; i < 500; ++i) {
        const auto a = oracle::random_on(rng, kScale, true);
        const auto b = oracle::random_on(rng, kScale, true);
        Round r = make_round(1, a, b, std::nullopt, std::nullopt);
        const Distribution mean = consensus_distribution(r);
        double sum = 0.0;
        for (double v : mean.probs()) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scale changes mid-history are protocol errors") {
    DebateConfig cfg;
    const auto held = dist({0.05, 0.10, 0.30, 0.35, 0.20});
    const LabelScale other({"a", "b", "c", "d", "e"});
    const auto foreign = Distribution::uniform(other);
    std::vector<Round> history{make_round(1, held, held, std::nullopt, std::nullopt)};
    Round bad{2, foreign, foreign, "x", "y", "", "", metrics::make_snapshot(foreign, foreign),
              0.4, Phase::integration};
    history.push_back(bad);
    CHECK_THROWS_AS(check_convergence(history, cfg), ProtocolError);
}

TEST_CASE("rounds carry crit scores when a scorer is wired in") {
    const DebateScript script = load_fixture_script();
    DebateConfig cfg;
    cfg.crit_gate = true;

    EngineOptions opts;
    opts.crit_scorer = [](const std::string&) { return 9.0; };
    const TranscriptRecord good = replay_script(script, cfg, opts);
    CHECK(good.verdict.kind == VerdictKind::converged);
    for (const Round& r : good.rounds) {
        REQUIRE(r.crit_a);
        CHECK(*r.crit_a == 9.0);
    }

    // Weak arguments at an otherwise converged state defer to human review.
    opts.crit_scorer = [](const std::string&) { return 3.0; };
    const TranscriptRecord weak = replay_script(script, cfg, opts);
    CHECK(weak.verdict.kind == VerdictKind::human_review);
    CHECK(weak.verdict.reason.find("tau_crit") != std::string::npos);
}

TEST_CASE("independent debates run concurrently with identical results") {
    const DebateScript script = load_fixture_script();
    DebateConfig cfg;

    std::vector<TranscriptRecord> results(8);
    std::vector<std::thread> workers;
    workers.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        workers.emplace_back(
            [&, i] { results[i] = replay_script(script, cfg); });
    }
    for (auto& w : workers) w.join();

    for (auto& r : results) {
        r.created_at.clear();
        r.finished_at.clear();
    }
    for (std::size_t i = 1; i < results.size(); ++i) {
        CHECK(results[i] == results[0]);
    }
    CHECK(results[0].verdict.kind == VerdictKind::converged);
}

TEST_CASE("verdict replay: check_convergence is pure over persisted rounds") {
    const DebateScript script = load_fixture_script();
    DebateConfig cfg;
    const TranscriptRecord t = replay_script(script, cfg);
    const auto again = check_convergence(t.rounds, t.config);
    REQUIRE(again);
    CHECK(again->kind == t.verdict.kind);
    CHECK(again->consensus == t.verdict.consensus);
}
