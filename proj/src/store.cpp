#include "evince/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <sstream>

#include "evince/errors.hpp"

namespace evince::store {

using nlohmann::json;

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
    if (value) {
        j[key] = *value;
    } else {
        j[key] = nullptr;
    }
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

json stance_to_json(const Stance& s) {
    return {{"position", to_string(s.position)},
            {"target_label", s.target_label},
            {"description", s.description}};
}

Stance stance_from_json(const json& j) {
    Stance s;
    s.position = stance_position_from_string(j.at("position").get<std::string>());
    s.target_label = j.at("target_label").get<std::string>();
    s.description = j.value("description", std::string());
    return s;
}

json snapshot_to_json(const metrics::MetricSnapshot& s) {
    json j{{"entropy_a", s.entropy_a},
           {"entropy_b", s.entropy_b},
           {"kl_ab", s.kl_ab},
           {"kl_ba", s.kl_ba},
           {"jsd", s.jsd},
           {"wd", s.wd},
           {"wd_normalized", s.wd_normalized},
           {"cross_entropy_ab", s.cross_entropy_ab}};
    put_optional(j, "mutual_info", s.mutual_info);
    put_optional(j, "nmi", s.nmi);
    put_optional(j, "kl_proxy", s.kl_proxy);
    return j;
}

metrics::MetricSnapshot snapshot_from_json(const json& j) {
    metrics::MetricSnapshot s;
    s.entropy_a = j.at("entropy_a").get<double>();
    s.entropy_b = j.at("entropy_b").get<double>();
    s.kl_ab = j.at("kl_ab").get<double>();
    s.kl_ba = j.at("kl_ba").get<double>();
    s.jsd = j.at("jsd").get<double>();
    s.wd = j.at("wd").get<double>();
    s.wd_normalized = j.at("wd_normalized").get<double>();
    s.cross_entropy_ab = j.at("cross_entropy_ab").get<double>();
    s.mutual_info = get_optional<double>(j, "mutual_info");
    s.nmi = get_optional<double>(j, "nmi");
    s.kl_proxy = get_optional<double>(j, "kl_proxy");
    return s;
}

void validate_rounds(const std::vector<Round>& rounds, const char* what) {
    if (rounds.empty()) {
        throw StoreError(std::string(what) + ": transcript must carry at least one round");
    }
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        if (rounds[i].index != static_cast<int>(i) + 1) {
            throw StoreError(std::string(what) + ": round indices must run contiguously from 1" +
                             " (found " + std::to_string(rounds[i].index) + " at position " +
                             std::to_string(i + 1) + ")");
        }
    }
}

}  // namespace

json to_json(const DebateConfig& cfg) {
    json j{{"tau_wd", cfg.tau_wd},
           {"tau_jsd", cfg.tau_jsd},
           {"eps_ce", cfg.eps_ce},
           {"eps_p", cfg.eps_p},
           {"tau_sim", cfg.tau_sim},
           {"crit_gate", cfg.crit_gate},
           {"tau_crit", cfg.tau_crit},
           {"k_consecutive", cfg.k_consecutive},
           {"t_max", cfg.t_max},
           {"delta_init", cfg.delta_init},
           {"delta_decay", cfg.delta_decay},
           {"delta_mode", to_string(cfg.delta_mode)},
           {"alpha", cfg.alpha},
           {"beta", cfg.beta},
           {"gamma", cfg.gamma},
           {"js_max", cfg.js_max},
           {"entropy_gap_min", cfg.entropy_gap_min},
           {"wd_separation_min", cfg.wd_separation_min}};
    put_optional(j, "tau_mi", cfg.tau_mi);
    put_optional(j, "kl_proxy_bound", cfg.kl_proxy_bound);
    put_optional(j, "kl_max", cfg.kl_max);
    put_optional(j, "wd_max", cfg.wd_max);
    return j;
}

namespace {

DebateConfig config_from_json(const json& j) {
    static const std::set<std::string> known{
        "tau_wd",       "tau_jsd",        "tau_mi",         "kl_proxy_bound",
        "eps_ce",       "eps_p",          "tau_sim",        "crit_gate",
        "tau_crit",     "k_consecutive",  "t_max",          "delta_init",
        "delta_decay",  "delta_mode",     "alpha",          "beta",
        "gamma",        "kl_max",         "js_max",         "wd_max",
        "entropy_gap_min", "wd_separation_min"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw StoreError("config: unknown key '" + key + "'");
        }
    }
    DebateConfig cfg;
    cfg.tau_wd = j.value("tau_wd", cfg.tau_wd);
    cfg.tau_jsd = j.value("tau_jsd", cfg.tau_jsd);
    cfg.eps_ce = j.value("eps_ce", cfg.eps_ce);
    cfg.eps_p = j.value("eps_p", cfg.eps_p);
    cfg.tau_sim = j.value("tau_sim", cfg.tau_sim);
    cfg.crit_gate = j.value("crit_gate", cfg.crit_gate);
    cfg.tau_crit = j.value("tau_crit", cfg.tau_crit);
    cfg.k_consecutive = j.value("k_consecutive", cfg.k_consecutive);
    cfg.t_max = j.value("t_max", cfg.t_max);
    cfg.delta_init = j.value("delta_init", cfg.delta_init);
    cfg.delta_decay = j.value("delta_decay", cfg.delta_decay);
    if (j.contains("delta_mode")) {
        cfg.delta_mode = delta_mode_from_string(j.at("delta_mode").get<std::string>());
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.js_max = j.value("js_max", cfg.js_max);
    cfg.entropy_gap_min = j.value("entropy_gap_min", cfg.entropy_gap_min);
    cfg.wd_separation_min = j.value("wd_separation_min", cfg.wd_separation_min);
    cfg.tau_mi = get_optional<double>(j, "tau_mi");
    cfg.kl_proxy_bound = get_optional<double>(j, "kl_proxy_bound");
    cfg.kl_max = get_optional<double>(j, "kl_max");
    cfg.wd_max = get_optional<double>(j, "wd_max");
    cfg.validate();
    return cfg;
}

RemoteAgentConfig agent_config_from_json(const json& j) {
    RemoteAgentConfig cfg;
    cfg.endpoint = j.at("endpoint").get<std::string>();
    cfg.model = j.value("model", cfg.model);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.prompt_template_path = j.value("prompt_template", cfg.prompt_template_path);
    cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
    cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
    return cfg;
}

}  // namespace

json to_json(const TranscriptRecord& record) {
    validate_rounds(record.rounds, "save");
    json j;
    j["schema_version"] = record.schema_version;
    j["subject_digest"] = record.subject_digest;
    j["scale"] = record.rounds.front().dist_a.scale().labels();
    j["stance_a"] = stance_to_json(record.stance_a);
    j["stance_b"] = stance_to_json(record.stance_b);
    j["config"] = to_json(record.config);
    if (record.initial_conditions) {
        const auto& ic = *record.initial_conditions;
        j["initial_conditions"] = {{"entropy_gap", ic.entropy_gap},
                                   {"wd", ic.wd},
                                   {"dual_entropy_satisfied", ic.dual_entropy_satisfied},
                                   {"notes", ic.notes}};
    } else {
        j["initial_conditions"] = nullptr;
    }
    j["rounds"] = json::array();
    for (const Round& r : record.rounds) {
        json jr{{"index", r.index},
                {"dist_a", r.dist_a.probs()},
                {"dist_b", r.dist_b.probs()},
                {"argument_a", r.argument_a},
                {"argument_b", r.argument_b},
                {"raw_a", r.raw_a},
                {"raw_b", r.raw_b},
                {"snapshot", snapshot_to_json(r.snapshot)},
                {"delta", r.delta},
                {"phase", to_string(r.phase)}};
        put_optional(jr, "sim_a", r.sim_a);
        put_optional(jr, "sim_b", r.sim_b);
        put_optional(jr, "crit_a", r.crit_a);
        put_optional(jr, "crit_b", r.crit_b);
        put_optional(jr, "note", r.note);
        j["rounds"].push_back(std::move(jr));
    }
    json verdict{{"kind", to_string(record.verdict.kind)}, {"reason", record.verdict.reason}};
    if (record.verdict.consensus) {
        verdict["consensus"] = record.verdict.consensus->probs();
    } else {
        verdict["consensus"] = nullptr;
    }
    j["verdict"] = std::move(verdict);
    j["created_at"] = record.created_at;
    j["finished_at"] = record.finished_at;
    return j;
}

TranscriptRecord transcript_from_json(const json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kTranscriptSchemaVersion) {
        throw StoreError("transcript schema version " + std::to_string(version) +
                         " does not match supported version " +
                         std::to_string(kTranscriptSchemaVersion) + "; migration required");
    }
    LabelScale scale(j.at("scale").get<std::vector<std::string>>());

    TranscriptRecord record;
    record.schema_version = version;
    record.subject_digest = j.at("subject_digest").get<std::string>();
    record.stance_a = stance_from_json(j.at("stance_a"));
    record.stance_b = stance_from_json(j.at("stance_b"));
    record.config = config_from_json(j.at("config"));
    if (j.contains("initial_conditions") && !j.at("initial_conditions").is_null()) {
        const auto& ji = j.at("initial_conditions");
        InitialConditionScore ic;
        ic.entropy_gap = ji.at("entropy_gap").get<double>();
        ic.wd = ji.at("wd").get<double>();
        ic.dual_entropy_satisfied = ji.at("dual_entropy_satisfied").get<bool>();
        ic.notes = ji.value("notes", std::string());
        record.initial_conditions = ic;
    }
    for (const auto& jr : j.at("rounds")) {
        Round r{jr.at("index").get<int>(),
                Distribution(scale, jr.at("dist_a").get<std::vector<double>>()),
                Distribution(scale, jr.at("dist_b").get<std::vector<double>>()),
                jr.at("argument_a").get<std::string>(),
                jr.at("argument_b").get<std::string>(),
                jr.at("raw_a").get<std::string>(),
                jr.at("raw_b").get<std::string>(),
                snapshot_from_json(jr.at("snapshot")),
                jr.at("delta").get<double>(),
                phase_from_string(jr.at("phase").get<std::string>())};
        r.sim_a = get_optional<double>(jr, "sim_a");
        r.sim_b = get_optional<double>(jr, "sim_b");
        r.crit_a = get_optional<double>(jr, "crit_a");
        r.crit_b = get_optional<double>(jr, "crit_b");
        r.note = get_optional<std::string>(jr, "note");
        record.rounds.push_back(std::move(r));
    }
    const auto& jv = j.at("verdict");
    record.verdict.kind = verdict_kind_from_string(jv.at("kind").get<std::string>());
    record.verdict.reason = jv.value("reason", std::string());
    if (jv.contains("consensus") && !jv.at("consensus").is_null()) {
        record.verdict.consensus =
            Distribution(scale, jv.at("consensus").get<std::vector<double>>());
    }
    record.created_at = j.value("created_at", std::string());
    record.finished_at = j.value("finished_at", std::string());

    validate_rounds(record.rounds, "load");
    if (record.verdict.kind == VerdictKind::converged && !record.verdict.consensus) {
        throw StoreError("load: converged verdict without a consensus distribution");
    }
    return record;
}

void save_transcript_file(const TranscriptRecord& record, const std::filesystem::path& path) {
    const json j = to_json(record);
    std::ofstream out(path);
    if (!out) throw StoreError("cannot write transcript: " + path.string());
    out << j.dump(2) << "\n";
}

TranscriptRecord load_transcript_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot read transcript: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw StoreError("transcript is not valid JSON: " + path.string() + ": " + e.what());
    }
    try {
        return transcript_from_json(j);
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw StoreError("transcript is malformed: " + path.string() + ": " + e.what());
    }
}

TranscriptStore::TranscriptStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path TranscriptStore::path_of(const std::string& id) const {
    return dir_ / (id + ".json");
}

std::string TranscriptStore::save(const TranscriptRecord& record,
                                  std::optional<std::string> id) {
    json j = to_json(record);
    if (!id) {
        json fingerprint = j;
        fingerprint.erase("created_at");
        fingerprint.erase("finished_at");
        id = fnv1a_hex(fingerprint.dump());
    }
    const auto path = path_of(*id);
    // O_EXCL keeps concurrent writers from silently clobbering one id.
    const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw StoreError("transcript id '" + *id + "' already exists (writes are exclusive)");
    }
    const std::string body = j.dump(2) + "\n";
    const ssize_t written = ::write(fd, body.data(), body.size());
    ::close(fd);
    if (written != static_cast<ssize_t>(body.size())) {
        throw StoreError("short write for transcript id '" + *id + "'");
    }
    return *id;
}

TranscriptRecord TranscriptStore::load(const std::string& id) const {
    const auto path = path_of(id);
    if (!std::filesystem::exists(path)) {
        throw StoreError("no transcript with id '" + id + "'");
    }
    return load_transcript_file(path);
}

// --- debate scripts ----------------------------------------------------------

json to_json(const DebateScript& script) {
    json j;
    j["subject"] = script.subject;
    j["scale"] = script.scale.labels();
    j["stance_a"] = stance_to_json(script.stance_a);
    j["stance_b"] = stance_to_json(script.stance_b);
    j["hold_after_end"] = script.hold_after_end;
    j["rounds"] = json::array();
    for (const auto& round : script.rounds) {
        json ja{{"dist", round.a.probs}, {"argument", round.a.argument}};
        put_optional(ja, "sim", round.a.sim);
        json jb{{"dist", round.b.probs}, {"argument", round.b.argument}};
        put_optional(jb, "sim", round.b.sim);
        j["rounds"].push_back({{"a", std::move(ja)}, {"b", std::move(jb)}});
    }
    return j;
}

DebateScript script_from_json(const json& j) {
    DebateScript script;
    script.subject = j.at("subject").get<std::string>();
    script.scale = LabelScale(j.at("scale").get<std::vector<std::string>>());
    script.stance_a = stance_from_json(j.at("stance_a"));
    script.stance_b = stance_from_json(j.at("stance_b"));
    script.hold_after_end = j.value("hold_after_end", false);

    int index = 0;
    for (const auto& jr : j.at("rounds")) {
        ++index;
        ScriptRound round;
        for (const char* side : {"a", "b"}) {
            const auto& js = jr.at(side);
            ScriptEntry entry;
            entry.probs = js.at("dist").get<std::vector<double>>();
            entry.argument = js.at("argument").get<std::string>();
            entry.sim = get_optional<double>(js, "sim");
            try {
                Distribution check(script.scale, entry.probs);
            } catch (const Error& e) {
                throw IngestError("script round " + std::to_string(index) + ", agent " + side +
                                  ": " + e.what());
            }
            (side[0] == 'a' ? round.a : round.b) = std::move(entry);
        }
        script.rounds.push_back(std::move(round));
    }
    if (script.rounds.empty()) {
        throw IngestError("debate script carries no rounds");
    }
    validate_stance(script.stance_a, script.scale);
    validate_stance(script.stance_b, script.scale);
    return script;
}

DebateScript load_debate_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read debate script: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestError("debate script is not valid JSON: " + path.string() + ": " + e.what());
    }
    try {
        return script_from_json(j);
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw IngestError("debate script is malformed: " + path.string() + ": " + e.what());
    }
}

// --- config ------------------------------------------------------------------

FileConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot read config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw StoreError("config is not valid JSON: " + path.string() + ": " + e.what());
    }
    FileConfig out;
    try {
        if (j.contains("debate")) {
            out.debate = config_from_json(j.at("debate"));
        } else {
            out.debate = DebateConfig{};
        }
        if (j.contains("agent") && !j.at("agent").is_null()) {
            out.agent = agent_config_from_json(j.at("agent"));
        }
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw StoreError("config is malformed: " + path.string() + ": " + e.what());
    }
    return out;
}

// --- datasets ----------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    return out;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<analysis::AnnotatedArticle> load_dataset(const std::filesystem::path& path,
                                                     const LabelScale& scale) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read dataset: " + path.string());

    std::vector<analysis::AnnotatedArticle> articles;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = strip(line);
        if (text.empty() || text.front() == '#') continue;

        auto fail = [&](const std::string& what) -> IngestError {
            return IngestError(path.filename().string() + ":" + std::to_string(line_no) + ": " +
                               what);
        };

        const auto fields = split(text, '|');
        if (fields.size() < 4) throw fail("expected id|category|source|ROLE=label...");

        analysis::AnnotatedArticle article;
        article.id = strip(fields[0]);
        article.category = strip(fields[1]);
        article.source = strip(fields[2]);
        if (article.id.empty()) throw fail("empty article id");
        if (!seen_ids.insert(article.id).second) throw fail("duplicate id '" + article.id + "'");

        for (std::size_t i = 3; i < fields.size(); ++i) {
            const std::string field = strip(fields[i]);
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw fail("field '" + field + "' is not key=value");
            const std::string key = strip(field.substr(0, eq));
            const std::string value = strip(field.substr(eq + 1));

            if (key == "biases") {
                const auto parts = split(value, ',');
                if (parts.size() != 3) throw fail("biases needs three comma-separated integers");
                try {
                    article.recorded_biases = analysis::BiasDistanceTriple{
                        std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2])};
                } catch (const std::exception&) {
                    throw fail("biases entries must be integers: '" + value + "'");
                }
            } else if (key == "note") {
                article.justification = value;
            } else if (key.size() == 1) {
                analysis::RaterRole role;
                try {
                    role = analysis::role_from_key(key[0]);
                } catch (const Error&) {
                    throw fail("unknown rater role '" + key + "'");
                }
                if (!scale.index_of(value)) {
                    throw fail("article " + article.id + ", role " + key +
                               ": rating '" + value + "' is not on the scale");
                }
                article.ratings[role] = value;
            } else {
                throw fail("unknown field '" + key + "'");
            }
        }

        for (const auto role :
             {analysis::RaterRole::democrat, analysis::RaterRole::republican,
              analysis::RaterRole::system}) {
            if (!article.ratings.count(role)) {
                throw fail("article " + article.id + " is missing required role " +
                           std::string(1, analysis::role_key(role)));
            }
        }
        articles.push_back(std::move(article));
    }
    return articles;
}

}  // namespace evince::store
