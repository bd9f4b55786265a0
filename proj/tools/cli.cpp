#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "evince/crit.hpp"
#include "evince/engine.hpp"
#include "evince/errors.hpp"
#include "evince/http_agent.hpp"
#include "evince/store.hpp"

namespace evince::cli {

namespace fs = std::filesystem;

namespace {

void print_round_table(const TranscriptRecord& transcript, std::ostream& out) {
    out << "round  delta  phase         WD      KL(A||B)  JS      CE(A,B)\n";
    out << std::fixed;
    for (const Round& r : transcript.rounds) {
        out << std::left << std::setw(7) << r.index << std::setprecision(2) << std::setw(7)
            << r.delta << std::setw(14) << to_string(r.phase) << std::setprecision(3)
            << std::setw(8) << r.snapshot.wd << std::setw(10) << r.snapshot.kl_ab << std::setw(8)
            << r.snapshot.jsd << std::setprecision(4) << r.snapshot.cross_entropy_ab << "\n";
    }
    out << "verdict: " << to_string(transcript.verdict.kind) << " — "
        << transcript.verdict.reason << "\n";
    if (transcript.verdict.consensus) {
        out << "consensus: " << format_distribution(*transcript.verdict.consensus) << "\n";
    }
}

void write_or_print(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw StoreError("cannot write output file: " + out_path);
    f << text;
}

int cmd_replay(const std::string& script_path, const std::string& config_path,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
    store::FileConfig config;
    try {
        config = store::load_config(config_path);
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    DebateScript script;
    try {
        script = store::load_debate_script(script_path);
    } catch (const Error& e) {
        err << "script error: " << e.what() << "\n";
        return kExitIngest;
    }

    const TranscriptRecord transcript = replay_script(script, config.debate);
    print_round_table(transcript, out);
    if (!out_path.empty()) {
        store::save_transcript_file(transcript, out_path);
        err << "transcript written to " << out_path << "\n";
    }
    return transcript.verdict.kind == VerdictKind::converged ? kExitOk : kExitHumanReview;
}

int cmd_analyze(const std::string& dataset_path, const std::string& format,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
    std::vector<analysis::AnnotatedArticle> dataset;
    const LabelScale scale = LabelScale::bias_five_point();
    try {
        dataset = store::load_dataset(dataset_path, scale);
    } catch (const Error& e) {
        err << "ingestion error: " << e.what() << "\n";
        return kExitIngest;
    }
    const auto report = analysis::aggregate(dataset, scale);
    const auto fmt =
        format == "csv" ? analysis::ReportFormat::csv : analysis::ReportFormat::markdown;
    write_or_print(analysis::emit_report(report, fmt), out_path, out);
    return kExitOk;
}

int cmd_debate(const std::string& subject, const std::string& config_path,
               const std::string& out_path, const std::string& target_label,
               const std::string& seed, std::ostream& out, std::ostream& err) {
    store::FileConfig config;
    try {
        config = store::load_config(config_path);
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!config.agent) {
        err << "config error: live debate needs an \"agent\" section\n";
        return kExitUsage;
    }
    const char* key = std::getenv(config.agent->api_key_env.c_str());
    if (!key || std::string(key).empty()) {
        err << "startup error: environment variable " << config.agent->api_key_env
            << " is not set; refusing to start (no network attempted)\n";
        return kExitRemoteAgent;
    }

    const LabelScale scale = LabelScale::bias_five_point();
    if (!scale.index_of(target_label)) {
        err << "usage error: --target-label must be one of the scale labels\n";
        return kExitUsage;
    }

    PromptTemplate tmpl = config.agent->prompt_template_path.empty()
                              ? PromptTemplate::built_in()
                              : PromptTemplate::load(config.agent->prompt_template_path);
    ChatClient client(*config.agent, key);
    HttpChatAgent agent_a("agent-A", client, tmpl, config.agent->max_attempts);
    HttpChatAgent agent_b("agent-B", client, tmpl, config.agent->max_attempts);

    Stance stance_a{StancePosition::support, target_label,
                    "defends the original annotation"};
    Stance stance_b{StancePosition::oppose, target_label,
                    "argues alternative readings of the subject"};

    TranscriptRecord transcript;
    try {
        transcript =
            run_debate(subject, agent_a, agent_b, config.debate, scale, stance_a, stance_b);
    } catch (const AgentError& e) {
        err << "remote agent failure: " << e.what() << "\n";
        return kExitRemoteAgent;
    }

    print_round_table(transcript, out);
    if (!out_path.empty()) {
        if (transcript.rounds.empty()) {
            err << "no rounds completed; transcript not written\n";
            return kExitRemoteAgent;
        }
        store::save_transcript_file(transcript, out_path);
        err << "transcript written to " << out_path << "\n";
    }
    (void)seed;
    return transcript.verdict.kind == VerdictKind::converged ? kExitOk : kExitHumanReview;
}

int cmd_crit(const std::string& fixtures_path, const std::string& doc_id, int depth, double tau,
             const std::string& format, std::ostream& out, std::ostream& err) {
    CritReport report;
    try {
        FixtureCritEvaluator evaluator = FixtureCritEvaluator::load(fixtures_path);
        report = crit_score(doc_id, evaluator, depth);
    } catch (const Error& e) {
        err << "crit error: " << e.what() << "\n";
        return kExitIngest;
    }

    const CritGate gate = gate_arguments(report, tau);
    if (format == "json") {
        nlohmann::json j{{"claim", report.claim},
                         {"gamma_total", report.gamma_total},
                         {"gate", gate == CritGate::pass ? "pass" : "flag"},
                         {"justification", report.justification}};
        out << j.dump(2) << "\n";
    } else {
        out << "claim: " << report.claim << "\n";
        auto print_group = [&](const char* name, const std::vector<ReasonAssessment>& group) {
            out << name << ":\n";
            for (const auto& a : group) {
                out << "  - [" << to_string(a.kind) << "] gamma=" << a.gamma
                    << " theta=" << a.theta << "  " << a.reason << "\n";
            }
        };
        print_group("supporting", report.supporting);
        print_group("rivals", report.rivals);
        out << std::fixed << std::setprecision(4) << "gamma_total: " << report.gamma_total
            << "\n";
        out << "gate (tau=" << tau << "): " << (gate == CritGate::pass ? "pass" : "flag")
            << "\n";
    }
    return gate == CritGate::pass ? kExitOk : kExitHumanReview;
}

int cmd_report(const std::string& transcript_path, const std::string& format, bool verify,
               std::ostream& out, std::ostream& err) {
    TranscriptRecord transcript;
    try {
        transcript = store::load_transcript_file(transcript_path);
    } catch (const Error& e) {
        err << "transcript error: " << e.what() << "\n";
        return kExitIngest;
    }
    if (format == "json") {
        out << store::to_json(transcript).dump(2) << "\n";
    } else {
        print_round_table(transcript, out);
    }
    if (verify) {
        const auto verdict = check_convergence(transcript.rounds, transcript.config);
        const bool reproduced = verdict && verdict->kind == transcript.verdict.kind &&
                                verdict->consensus == transcript.verdict.consensus;
        out << "verdict reproduced from rounds+config: " << (reproduced ? "yes" : "NO") << "\n";
        if (!reproduced) return kExitHumanReview;
    }
    return kExitOk;
}

int cmd_review_queue(const std::string& dir, std::ostream& out, std::ostream& err) {
    std::size_t entries = 0;
    std::vector<fs::path> files;
    try {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
    } catch (const fs::filesystem_error& e) {
        err << "cannot scan directory: " << e.what() << "\n";
        return kExitUsage;
    }
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
        TranscriptRecord t;
        try {
            t = store::load_transcript_file(path);
        } catch (const Error& e) {
            err << "skipping " << path.string() << ": " << e.what() << "\n";
            continue;
        }
        if (t.verdict.kind != VerdictKind::converged) {
            out << "human-review: " << path.string() << " — " << t.verdict.reason << "\n";
            ++entries;
        }
        for (const Round& r : t.rounds) {
            for (const auto& [score, side] :
                 {std::pair{r.crit_a, 'A'}, std::pair{r.crit_b, 'B'}}) {
                if (score && *score < t.config.tau_crit) {
                    out << "crit-flag: " << path.string() << " round " << r.index << " agent "
                        << side << " (score " << *score << " < " << t.config.tau_crit << ")\n";
                    ++entries;
                }
            }
        }
    }
    out << entries << " review-queue entr" << (entries == 1 ? "y" : "ies") << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"metric-controlled adversarial debate engine"};
    app.require_subcommand(1);

    // replay
    std::string script_path, config_path, out_path, format = "md", seed;
    auto* replay = app.add_subcommand("replay", "replay a recorded debate script");
    replay->add_option("--script", script_path, "debate script JSON")->required();
    replay->add_option("--config", config_path, "config JSON")->required();
    replay->add_option("--out", out_path, "write the transcript JSON here");
    replay->add_option("--seed", seed, "determinism knob recorded with the run");

    // analyze
    std::string dataset_path;
    auto* analyze = app.add_subcommand("analyze", "bias-distance analysis over a dataset");
    analyze->add_option("--dataset", dataset_path, "article dataset file")->required();
    analyze->add_option("--format", format, "md|csv")->check(CLI::IsMember({"md", "csv"}));
    analyze->add_option("--out", out_path, "write the report here instead of stdout");

    // debate
    std::string subject, subject_file, target_label = "neutral";
    auto* debate = app.add_subcommand("debate", "run a live debate against a remote endpoint");
    debate->add_option("--subject", subject, "subject text");
    debate->add_option("--subject-file", subject_file, "file with the subject text");
    debate->add_option("--config", config_path, "config JSON with an agent section")->required();
    debate->add_option("--out", out_path, "write the transcript JSON here");
    debate->add_option("--target-label", target_label, "label the supporting agent defends");
    debate->add_option("--seed", seed, "determinism knob recorded with the run");

    // crit
    std::string fixtures_path, doc_id;
    int depth = 2;
    double tau = 6.0;
    auto* crit = app.add_subcommand("crit", "score a document's argument quality");
    crit->add_option("--fixtures", fixtures_path, "crit fixture JSON")->required();
    crit->add_option("--doc", doc_id, "document id inside the fixture")->required();
    crit->add_option("--depth", depth, "recursion depth bound");
    crit->add_option("--tau", tau, "pass/flag threshold");
    crit->add_option("--format", format, "md|json")->check(CLI::IsMember({"md", "json"}));

    // report
    std::string transcript_path;
    bool verify = false;
    auto* report = app.add_subcommand("report", "render a saved transcript");
    report->add_option("--transcript", transcript_path, "transcript JSON")->required();
    report->add_option("--format", format, "md|json")->check(CLI::IsMember({"md", "json"}));
    report->add_flag("--verify", verify, "re-run the convergence check and compare verdicts");

    // review-queue
    std::string queue_dir;
    auto* queue = app.add_subcommand("review-queue", "list transcripts needing human review");
    queue->add_option("--dir", queue_dir, "directory of transcript JSON files")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (replay->parsed()) return cmd_replay(script_path, config_path, out_path, out, err);
        if (analyze->parsed()) return cmd_analyze(dataset_path, format, out_path, out, err);
        if (debate->parsed()) {
            if (subject.empty() && !subject_file.empty()) {
                std::ifstream in(subject_file);
                if (!in) {
                    err << "cannot read subject file: " << subject_file << "\n";
                    return kExitUsage;
                }
                std::ostringstream buf;
                buf << in.rdbuf();
                subject = buf.str();
            }
            if (subject.empty()) {
                err << "usage error: debate needs --subject or --subject-file\n";
                return kExitUsage;
            }
            return cmd_debate(subject, config_path, out_path, target_label, seed, out, err);
        }
        if (crit->parsed()) {
            return cmd_crit(fixtures_path, doc_id, depth, tau,
                            format == "md" ? "md" : format, out, err);
        }
        if (report->parsed()) return cmd_report(transcript_path, format, verify, out, err);
        if (queue->parsed()) return cmd_review_queue(queue_dir, out, err);
    } catch (const IngestError& e) {
        err << "ingestion error: " << e.what() << "\n";
        return kExitIngest;
    } catch (const AgentError& e) {
        err << "remote agent failure: " << e.what() << "\n";
        return kExitRemoteAgent;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace evince::cli
