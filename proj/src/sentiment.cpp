#include "leanlab/sentiment.hpp"

#include "leanlab/error.hpp"
#include "leanlab/ingest.hpp"
#include "strings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace leanlab {

namespace {

constexpr double kNegationFactor = -0.5;
constexpr std::size_t kNegationWindow = 3;
constexpr double kRuleNormalizer = 15.0;
constexpr double kRuleThreshold = 0.05;
constexpr double kWordlistScale = 5.0;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

struct LexiconRow {
    const char* word;
    double pattern;
    double rule;
    int wordlist;
};

// clang-format off
constexpr LexiconRow kBuiltinWords[] = {
    {"good", 0.7, 1.9, 3},        {"great", 0.8, 3.1, 3},      {"excellent", 1.0, 2.7, 3},
    {"best", 1.0, 3.2, 3},        {"happy", 0.8, 2.7, 3},      {"love", 0.5, 3.2, 3},
    {"wonderful", 1.0, 2.7, 4},   {"amazing", 0.6, 2.8, 4},    {"nice", 0.6, 1.8, 3},
    {"win", 0.8, 2.8, 4},         {"proud", 0.8, 2.1, 2},      {"hope", 0.4, 1.9, 2},
    {"brave", 0.8, 2.4, 2},       {"strong", 0.43, 2.3, 2},    {"support", 0.3, 1.7, 2},
    {"fair", 0.7, 1.3, 2},        {"honest", 0.6, 2.3, 2},     {"thank", 0.2, 1.5, 2},
    {"success", 0.3, 2.7, 2},     {"safe", 0.5, 1.9, 1},       {"agree", 0.3, 1.5, 1},
    {"bad", -0.7, -2.5, -3},      {"terrible", -1.0, -2.1, -3}, {"awful", -1.0, -2.0, -3},
    {"horrible", -1.0, -2.5, -3}, {"worst", -1.0, -3.1, -3},   {"sad", -0.5, -2.1, -2},
    {"wrong", -0.5, -2.1, -2},    {"evil", -1.0, -3.4, -3},    {"disgusting", -1.0, -2.4, -3},
    {"stupid", -0.8, -2.4, -2},   {"angry", -0.5, -2.3, -3},   {"hate", -0.8, -2.7, -3},
    {"dangerous", -0.6, -2.1, -2}, {"fake", -0.5, -2.1, -3},   {"poor", -0.4, -2.1, -2},
    {"corrupt", -0.5, -2.6, -3},  {"disgraceful", -0.7, -2.2, -3}, {"shame", -0.5, -2.1, -2},
    {"liar", -0.6, -2.2, -3},     {"fail", -0.5, -2.5, -2},    {"failure", -0.3, -2.3, -2},
    {"crisis", -0.3, -3.1, -3},   {"abandon", -0.4, -1.9, -2}, {"threat", -0.4, -2.4, -2},
    {"destroy", -0.6, -2.6, -3},
};
// clang-format on

constexpr std::pair<const char*, double> kBuiltinIntensifiers[] = {
    {"very", 1.3},      {"really", 1.3},     {"so", 1.3},       {"totally", 1.3},
    {"extremely", 1.5}, {"absolutely", 1.5}, {"incredibly", 1.5}, {"slightly", 0.5},
    {"somewhat", 0.7},
};

constexpr const char* kBuiltinNegations[] = {
    "not",   "no",     "never", "don't", "dont",  "doesn't", "isn't", "wasn't", "aren't",
    "can't", "cannot", "won't", "didn't", "nothing", "neither", "nor", "without",
};

template <typename Pick>
SentimentLexicon build_builtin(Pick pick, bool with_modifiers) {
    SentimentLexicon lex;
    for (const auto& row : kBuiltinWords) lex.add_word(row.word, pick(row));
    if (with_modifiers) {
        for (const auto& [w, b] : kBuiltinIntensifiers) lex.add_intensifier(w, b);
        for (const char* w : kBuiltinNegations) lex.add_negation(w);
    }
    return lex;
}

// Modified per-token scores for every lexicon hit.
std::vector<double> modified_scores(const std::vector<std::string>& tokens, const SentimentLexicon& lex) {
    std::vector<double> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const double* s = lex.score(tokens[i]);
        if (!s) continue;
        double v = *s;
        if (i > 0) {
            if (const double* b = lex.boost(tokens[i - 1])) v *= *b;
        }
        const std::size_t from = i >= kNegationWindow ? i - kNegationWindow : 0;
        for (std::size_t j = from; j < i; ++j) {
            if (lex.is_negation(tokens[j])) {
                v *= kNegationFactor;
                break;
            }
        }
        out.push_back(v);
    }
    return out;
}

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80 || c == '\'';
}

} // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file '" + path.string() + "'");
    return parse(in, path.string());
}

SentimentLexicon SentimentLexicon::parse(std::istream& in, std::string_view source_name) {
    SentimentLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw DataError(std::string(source_name) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::trim(line).empty() || line.front() == '#') continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            cols.emplace_back(detail::trim(std::string_view(line).substr(pos, tab - pos)));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (cols.size() < 2 || cols[0].empty()) fail("expected word<TAB>score");
        const std::string kind = cols.size() > 2 ? detail::to_lower(cols[2]) : "word";
        if (kind == "negation") {
            lex.add_negation(cols[0]);
            continue;
        }
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(cols[1], &used);
            if (used != cols[1].size()) fail("bad score '" + cols[1] + "'");
        } catch (const std::logic_error&) {
            fail("bad score '" + cols[1] + "'");
        }
        if (!std::isfinite(value)) fail("non-finite score");
        if (kind == "word") {
            lex.add_word(cols[0], value);
        } else if (kind == "intensifier") {
            if (value <= 0.0) fail("intensifier boost must be positive");
            lex.add_intensifier(cols[0], value);
        } else {
            fail("unknown entry kind '" + kind + "'");
        }
    }
    return lex;
}

void SentimentLexicon::add_word(std::string word, double score) {
    if (!std::isfinite(score)) throw std::invalid_argument("lexicon score must be finite");
    scores_[detail::to_lower(word)] = score;
}

void SentimentLexicon::add_intensifier(std::string word, double boost) {
    if (!(boost > 0.0) || !std::isfinite(boost)) throw std::invalid_argument("boost must be positive");
    boosts_[detail::to_lower(word)] = boost;
}

void SentimentLexicon::add_negation(std::string word) { negations_.insert(detail::to_lower(word)); }

const double* SentimentLexicon::score(std::string_view word) const {
    auto it = scores_.find(std::string(word));
    return it == scores_.end() ? nullptr : &it->second;
}

const double* SentimentLexicon::boost(std::string_view word) const {
    auto it = boosts_.find(std::string(word));
    return it == boosts_.end() ? nullptr : &it->second;
}

bool SentimentLexicon::is_negation(std::string_view word) const {
    return negations_.count(std::string(word)) != 0;
}

const SentimentLexicon& builtin_pattern_lexicon() {
    static const SentimentLexicon lex =
        build_builtin([](const LexiconRow& r) { return r.pattern; }, true);
    return lex;
}

const SentimentLexicon& builtin_rule_lexicon() {
    static const SentimentLexicon lex = build_builtin([](const LexiconRow& r) { return r.rule; }, true);
    return lex;
}

const SentimentLexicon& builtin_wordlist_lexicon() {
    static const SentimentLexicon lex =
        build_builtin([](const LexiconRow& r) { return static_cast<double>(r.wordlist); }, false);
    return lex;
}

std::vector<std::string> sentiment_tokens(std::string_view text) {
    std::string clean = strip_urls(text);
    // typographic apostrophe
    for (std::size_t p; (p = clean.find("\xE2\x80\x99")) != std::string::npos;) clean.replace(p, 3, "'");

    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        std::string_view t = cur;
        while (!t.empty() && t.front() == '\'') t.remove_prefix(1);
        while (!t.empty() && t.back() == '\'') t.remove_suffix(1);
        if (!t.empty()) tokens.push_back(detail::to_lower(t));
        cur.clear();
    };
    for (char c : clean) {
        if (is_word_byte(c)) cur.push_back(c);
        else flush();
    }
    flush();
    return tokens;
}

double polarity_pattern(std::string_view text, const SentimentLexicon& lexicon) {
    const auto scores = modified_scores(sentiment_tokens(text), lexicon);
    if (scores.empty()) return 0.0;
    double sum = 0.0;
    for (double s : scores) sum += s;
    return clamp_unit(sum / static_cast<double>(scores.size()));
}

double rule_compound(std::string_view text, const SentimentLexicon& lexicon) {
    double sum = 0.0;
    for (double s : modified_scores(sentiment_tokens(text), lexicon)) sum += s;
    if (sum == 0.0) return 0.0;
    return clamp_unit(sum / std::sqrt(sum * sum + kRuleNormalizer));
}

int polarity_rule(std::string_view text, const SentimentLexicon& lexicon) {
    const double s = rule_compound(text, lexicon);
    if (s >= kRuleThreshold) return 1;
    if (s <= -kRuleThreshold) return -1;
    return 0;
}

double polarity_wordlist(std::string_view text, const SentimentLexicon& lexicon) {
    double sum = 0.0;
    std::size_t matched = 0;
    for (const auto& tok : sentiment_tokens(text)) {
        if (const double* s = lexicon.score(tok)) {
            sum += *s;
            ++matched;
        }
    }
    if (matched == 0) return 0.0;
    return clamp_unit(sum / static_cast<double>(matched) / kWordlistScale);
}

double combine(double alpha, int beta, double gamma) {
    if (!(alpha >= -1.0 && alpha <= 1.0)) throw std::invalid_argument("alpha outside [-1, 1]");
    if (beta < -1 || beta > 1) throw std::invalid_argument("beta outside {-1, 0, 1}");
    if (!(gamma >= -1.0 && gamma <= 1.0)) throw std::invalid_argument("gamma outside [-1, 1]");
    return (alpha + static_cast<double>(beta) + gamma) / 3.0;
}

SentimentScore analyze_sentiment(std::string_view text, const SentimentLexicons& lexicons) {
    SentimentScore s;
    s.alpha = polarity_pattern(text, *lexicons.pattern);
    s.beta = polarity_rule(text, *lexicons.rule);
    s.gamma = polarity_wordlist(text, *lexicons.wordlist);
    s.tau = combine(s.alpha, s.beta, s.gamma);
    return s;
}

} // namespace leanlab
