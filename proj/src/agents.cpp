#include "evince/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "evince/errors.hpp"

namespace evince {

const char* to_string(StancePosition p) {
    return p == StancePosition::support ? "support" : "oppose";
}

StancePosition stance_position_from_string(const std::string& s) {
    if (s == "support") return StancePosition::support;
    if (s == "oppose") return StancePosition::oppose;
    throw ValidationError("unknown stance position: " + s);
}

void validate_stance(const Stance& stance, const LabelScale& scale) {
    if (!scale.index_of(stance.target_label)) {
        throw ValidationError("stance target label '" + stance.target_label +
                              "' is not on the active scale");
    }
}

// --- scripted agents -------------------------------------------------------

DebateScript DebateScript::truncated(std::size_t n_rounds) const {
    DebateScript copy = *this;
    if (n_rounds < copy.rounds.size()) {
        copy.rounds.resize(n_rounds);
    }
    return copy;
}

ScriptedAgent::ScriptedAgent(std::shared_ptr<const DebateScript> script, Side side)
    : script_(std::move(script)), side_(side) {
    if (!script_) throw ValidationError("scripted agent needs a script");
    validate_stance(side_ == Side::a ? script_->stance_a : script_->stance_b, script_->scale);
}

std::string ScriptedAgent::name() const {
    return side_ == Side::a ? "scripted-A" : "scripted-B";
}

AgentReply ScriptedAgent::propose(const AgentTurnContext& ctx) {
    if (ctx.scale != script_->scale) {
        throw ScaleMismatchError("scripted agent invoked with a different label scale");
    }
    const std::size_t idx = static_cast<std::size_t>(ctx.round_index);
    bool holding = false;
    const ScriptEntry* entry = nullptr;
    if (idx >= 1 && idx <= script_->rounds.size()) {
        entry = side_ == Side::a ? &script_->rounds[idx - 1].a : &script_->rounds[idx - 1].b;
    } else if (script_->hold_after_end && !script_->rounds.empty()) {
        entry = side_ == Side::a ? &script_->rounds.back().a : &script_->rounds.back().b;
        holding = true;
    } else {
        throw AgentError("script exhausted: no entry for round " + std::to_string(ctx.round_index),
                         1, "");
    }

    AgentReply reply{Distribution(script_->scale, entry->probs), entry->argument, "", std::nullopt};
    reply.raw = format_distribution(reply.dist) + "\n\nArgument: " + entry->argument;
    // A held entry repeats the final argument verbatim, so similarity is
    // recomputed rather than replayed.
    if (!holding) reply.recorded_sim = entry->sim;
    return reply;
}

// --- prompt rendering -------------------------------------------------------

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
    if (text_.empty()) throw TemplateError("prompt template is empty");
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TemplateError("cannot read prompt template: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return PromptTemplate(buf.str());
}

PromptTemplate PromptTemplate::built_in() {
    return PromptTemplate(
        "You are one of two analysts holding a structured debate about how a subject "
        "should be rated.\n"
        "\n"
        "{stance}\n"
        "\n"
        "Subject under debate:\n"
        "{subject}\n"
        "\n"
        "Contentiousness: {delta}\n"
        "Debate phase: {phase}\n"
        "Rating scale, most negative first: {scale_labels}\n"
        "\n"
        "{history_digest}"
        "{format_instructions}\n");
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
    std::string out;
    out.reserve(text_.size() + 256);
    for (std::size_t i = 0; i < text_.size();) {
        const char c = text_[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::size_t close = text_.find('}', i + 1);
        if (close == std::string::npos) {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::string key = text_.substr(i + 1, close - i - 1);
        const bool name_like = !key.empty() &&
            std::all_of(key.begin(), key.end(),
                        [](unsigned char ch) { return std::isalnum(ch) || ch == '_'; });
        if (!name_like) {
            out.push_back(c);
            ++i;
            continue;
        }
        auto it = bindings.find(key);
        if (it == bindings.end()) {
            throw TemplateError("no binding for template placeholder {" + key + "}");
        }
        out += it->second;
        i = close + 1;
    }
    return out;
}

std::string contentiousness_directive(double delta) {
    if (delta >= 0.8) {
        return "Tone: highly confrontational. Attack every weakness in the opposing "
               "position, foreground risks and downsides, and use definitive language. "
               "Concede nothing without strong evidence.";
    }
    if (delta >= 0.6) {
        return "Tone: confrontational but fair. Keep your serious objections front and "
               "center while acknowledging points that genuinely hold up.";
    }
    if (delta >= 0.4) {
        return "Tone: balanced. Weigh strengths and weaknesses evenly and look for a "
               "defensible middle ground.";
    }
    if (delta >= 0.15) {
        return "Tone: more agreeable than combative. Support reasonable points from the "
               "other side; keep any remaining reservations explicit but measured.";
    }
    return "Tone: fully conciliatory and supportive. Seek agreement, consolidate shared "
           "conclusions, and help close out the consensus.";
}

namespace {

std::string truncate_text(const std::string& s, std::size_t limit) {
    if (s.size() <= limit) return s;
    return s.substr(0, limit) + "...";
}

std::string probs_brief(const Distribution& d) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << "(";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out << ", ";
        out << d[i];
    }
    out << ")";
    return out.str();
}

}  // namespace

std::string history_digest(std::span<const Round> history, Side side) {
    if (history.empty()) return "";
    std::ostringstream out;
    out << "Prior rounds:\n";
    for (const Round& r : history) {
        const Distribution& mine = side == Side::a ? r.dist_a : r.dist_b;
        const Distribution& theirs = side == Side::a ? r.dist_b : r.dist_a;
        const std::string& my_arg = side == Side::a ? r.argument_a : r.argument_b;
        const std::string& their_arg = side == Side::a ? r.argument_b : r.argument_a;
        out << "Round " << r.index << ":\n"
            << "  you " << probs_brief(mine) << ": " << truncate_text(my_arg, 400) << "\n"
            << "  opponent " << probs_brief(theirs) << ": " << truncate_text(their_arg, 400)
            << "\n";
    }
    out << "\n";
    return out.str();
}

std::string format_instructions(const LabelScale& scale) {
    std::ostringstream out;
    out << "Reply with one line per label, exactly in the form \"<label>: <percent>%\", "
           "covering all " << scale.size()
        << " labels once, in scale order, summing to 100%. Then write a section starting "
           "with \"Argument:\" giving the reasoning behind your distribution.";
    return out.str();
}

std::string render_prompt(const AgentTurnContext& ctx, const PromptTemplate& tmpl) {
    validate_stance(ctx.stance, ctx.scale);
    std::ostringstream stance;
    stance << "Your assigned stance (restated): "
           << (ctx.stance.position == StancePosition::support
                   ? "SUPPORT the label \""
                   : "OPPOSE the label \"")
           << ctx.stance.target_label << "\"";
    if (!ctx.stance.description.empty()) stance << " — " << ctx.stance.description;
    stance << ". Hold this stance in every round; do not drift from it.";

    std::ostringstream delta;
    delta << std::fixed << std::setprecision(2) << ctx.delta << "\n"
          << contentiousness_directive(ctx.delta);

    std::string labels;
    for (std::size_t i = 0; i < ctx.scale.size(); ++i) {
        if (i) labels += ", ";
        labels += ctx.scale.label(i);
    }

    std::map<std::string, std::string> bindings{
        {"subject", ctx.subject},
        {"stance", stance.str()},
        {"delta", delta.str()},
        {"phase", to_string(ctx.phase)},
        {"scale_labels", labels},
        {"history_digest", history_digest(ctx.history, ctx.side)},
        {"format_instructions", format_instructions(ctx.scale)},
    };
    return tmpl.render(bindings);
}

// --- distribution parsing ---------------------------------------------------

namespace {

std::string lowercase(const std::string& s) {
    std::string out(s.size(), '\0');
    std::transform(s.begin(), s.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct NumberToken {
    double value = 0.0;
    bool percent = false;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// All "123", "12.5", ".5" tokens with an optional trailing %.
std::vector<NumberToken> scan_numbers(const std::string& text) {
    std::vector<NumberToken> out;
    for (std::size_t i = 0; i < text.size();) {
        const bool digit = std::isdigit(static_cast<unsigned char>(text[i]));
        const bool dot_start = text[i] == '.' && i + 1 < text.size() &&
                               std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (!digit && !dot_start) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool seen_dot = false;
        while (j < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[j])) ||
                (text[j] == '.' && !seen_dot))) {
            if (text[j] == '.') seen_dot = true;
            ++j;
        }
        NumberToken tok;
        tok.begin = i;
        tok.value = std::stod(text.substr(i, j - i));
        std::size_t k = j;
        while (k < text.size() && text[k] == ' ') ++k;
        if (k < text.size() && text[k] == '%') {
            tok.percent = true;
            j = k + 1;
        }
        tok.end = j;
        out.push_back(tok);
        i = j;
    }
    return out;
}

bool word_boundary(const std::string& text, std::size_t begin, std::size_t end) {
    auto alnum = [&](std::size_t pos) {
        return pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]));
    };
    if (begin > 0 && alnum(begin - 1)) return false;
    if (alnum(end)) return false;
    return true;
}

// Label-name extraction: longest labels first so "weak negative" claims its
// span before "negative" can.
std::optional<std::vector<NumberToken>> match_by_labels(const std::string& lower,
                                                        const LabelScale& scale,
                                                        const std::vector<NumberToken>& numbers) {
    std::vector<std::size_t> order(scale.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return scale.label(x).size() > scale.label(y).size();
    });

    std::vector<std::pair<std::size_t, std::size_t>> claimed;
    auto overlaps = [&](std::size_t b, std::size_t e) {
        return std::any_of(claimed.begin(), claimed.end(), [&](const auto& span) {
            return b < span.second && span.first < e;
        });
    };

    std::vector<std::optional<NumberToken>> found(scale.size());
    for (std::size_t idx : order) {
        const std::string needle = lowercase(scale.label(idx));
        for (std::size_t pos = lower.find(needle); pos != std::string::npos;
             pos = lower.find(needle, pos + 1)) {
            const std::size_t end = pos + needle.size();
            if (overlaps(pos, end) || !word_boundary(lower, pos, end)) continue;
            // The nearest number within a short window after the label.
            const NumberToken* best = nullptr;
            for (const auto& tok : numbers) {
                if (tok.begin >= end && tok.begin <= end + 12) {
                    best = &tok;
                    break;
                }
            }
            if (!best) continue;
            found[idx] = *best;
            claimed.emplace_back(pos, best->end);
            break;
        }
        if (!found[idx]) return std::nullopt;
    }

    std::vector<NumberToken> out;
    out.reserve(scale.size());
    for (auto& tok : found) out.push_back(*tok);
    return out;
}

}  // namespace

Distribution parse_distribution(const std::string& raw, const LabelScale& scale) {
    const std::string lower = lowercase(raw);
    const auto numbers = scan_numbers(lower);

    std::vector<NumberToken> picked;
    if (auto by_label = match_by_labels(lower, scale, numbers)) {
        picked = std::move(*by_label);
    } else if (numbers.size() == scale.size()) {
        picked = numbers;
    } else {
        throw ParseError("could not extract one value per label (" +
                         std::to_string(scale.size()) + " expected, " +
                         std::to_string(numbers.size()) + " numbers found)");
    }

    const bool any_percent =
        std::any_of(picked.begin(), picked.end(), [](const auto& t) { return t.percent; });
    double sum = 0.0;
    for (const auto& t : picked) sum += t.value;
    const bool as_percent = any_percent || sum > 1.5;

    std::vector<double> probs(picked.size());
    double total = 0.0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
        probs[i] = as_percent ? picked[i].value / 100.0 : picked[i].value;
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 0.1) {
        throw ParseError("extracted values sum to " + std::to_string(total) +
                         ", too far from 1 to renormalize");
    }
    if (total <= 0.0) throw ParseError("extracted values sum to zero");
    for (double& v : probs) v /= total;
    return Distribution(scale, std::move(probs));
}

std::string format_distribution(const Distribution& dist) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(10);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i) out << ", ";
        out << dist.scale().label(i) << ": " << dist[i] * 100.0 << "%";
    }
    return out.str();
}

// --- argument similarity ----------------------------------------------------

double jaccard_similarity(const std::string& a, const std::string& b) {
    auto tokens = [](const std::string& text) {
        std::unordered_set<std::string> out;
        std::string cur;
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                cur.push_back(static_cast<char>(std::tolower(c)));
            } else if (!cur.empty()) {
                out.insert(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) out.insert(cur);
        return out;
    };
    const auto ta = tokens(a);
    const auto tb = tokens(b);
    if (ta.empty() && tb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& tok : ta) common += tb.count(tok);
    const std::size_t uni = ta.size() + tb.size() - common;
    return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace evince
