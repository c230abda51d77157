#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace leanlab {

/// Per-post sentiment: pattern polarity, trichotomized rule polarity,
/// wordlist polarity and their mean.
struct SentimentScore {
    double alpha = 0.0;
    int beta = 0;
    double gamma = 0.0;
    double tau = 0.0;
};

/// Word scores plus the modifier words the analyzers understand.
///
/// File format is UTF-8, one entry per line: `word<TAB>score[<TAB>kind]`
/// where kind is `word` (default), `intensifier` (score is a multiplicative
/// boost, must be > 0) or `negation` (score ignored). Lines starting with '#'
/// are comments.
class SentimentLexicon {
public:
    SentimentLexicon() = default;

    static SentimentLexicon load(const std::filesystem::path& path);
    static SentimentLexicon parse(std::istream& in, std::string_view source_name = "<stream>");

    void add_word(std::string word, double score);
    void add_intensifier(std::string word, double boost);
    void add_negation(std::string word);

    const double* score(std::string_view word) const;
    const double* boost(std::string_view word) const;
    bool is_negation(std::string_view word) const;

    std::size_t size() const { return scores_.size(); }

private:
    std::unordered_map<std::string, double> scores_;
    std::unordered_map<std::string, double> boosts_;
    std::unordered_set<std::string> negations_;
};

/// Built-in lexicons (about forty words each) used when no files are given.
/// Pattern scores lie in [-1, 1], rule valences in [-4, 4], wordlist scores
/// are integers in [-5, 5].
const SentimentLexicon& builtin_pattern_lexicon();
const SentimentLexicon& builtin_rule_lexicon();
const SentimentLexicon& builtin_wordlist_lexicon();

/// Lowercased word tokens for sentiment scoring; surrounding punctuation and
/// URLs are dropped, in-word apostrophes kept ("don't").
std::vector<std::string> sentiment_tokens(std::string_view text);

/// Mean of matched word scores after modifiers, clamped to [-1, 1].
/// A negation among the three preceding tokens multiplies a score by -0.5;
/// an intensifier immediately before multiplies it by its boost.
double polarity_pattern(std::string_view text, const SentimentLexicon& lexicon);

/// Normalized compound s = sum / sqrt(sum^2 + 15) over modified valences,
/// mapped to +1 (s >= 0.05), -1 (s <= -0.05) or 0.
int polarity_rule(std::string_view text, const SentimentLexicon& lexicon);
double rule_compound(std::string_view text, const SentimentLexicon& lexicon);

/// Mean matched score divided by 5, clamped to [-1, 1]. No modifiers.
double polarity_wordlist(std::string_view text, const SentimentLexicon& lexicon);

/// Arithmetic mean. Throws std::invalid_argument for out-of-range inputs.
double combine(double alpha, int beta, double gamma);

struct SentimentLexicons {
    const SentimentLexicon* pattern = &builtin_pattern_lexicon();
    const SentimentLexicon* rule = &builtin_rule_lexicon();
    const SentimentLexicon* wordlist = &builtin_wordlist_lexicon();
};

/// All three analyzers on the post text with URLs removed.
SentimentScore analyze_sentiment(std::string_view text, const SentimentLexicons& lexicons = {});

} // namespace leanlab
