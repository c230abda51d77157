#pragma once

#include "leanlab/bias_registry.hpp"
#include "leanlab/ingest.hpp"
#include "leanlab/leaning.hpp"
#include "leanlab/sentiment.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leanlab {

enum class LabelMethod { Type1, Type2Flip, Type2Scale };

std::string_view to_string(LabelMethod m);

/// How Heuristic-2 combines sentiment with the domain leaning.
enum class SentimentMode { Flip, Scale };

struct LabeledPost {
    std::string post_id;
    double unscaled = 0.0;          // mean leaning code of the post's known domains
    std::optional<double> tau;      // set for the sentiment methods
    std::optional<double> adjusted; // unscaled * tau, scale mode only
    Leaning label = Leaning::Center;
    LabelMethod method = LabelMethod::Type1;
    std::size_t domain_count = 0;
};

/// Mean of the leaning codes. Returns nullopt for an empty list: the post
/// has no known news domain and gets no label.
std::optional<double> unscaled_leaning(std::span<const Leaning> domains);

/// Left for p <= -0.1, Right for p >= 0.1, Center strictly between.
Leaning threshold(double p_hat);

/// Known-leaning domains linked by the post, de-duplicated.
std::vector<Leaning> known_leanings(const Post& post, const BiasRegistry& registry);

std::optional<LabeledPost> label_type1(const Post& post, const BiasRegistry& registry);

/// Flip: a negative tau swaps Left and Right and leaves Center alone.
/// Scale: the unscaled leaning is multiplied by tau and re-thresholded.
std::optional<LabeledPost> label_type2(const Post& post, const BiasRegistry& registry,
                                       const SentimentScore& score, SentimentMode mode);

/// Heuristic-2 decision from an already computed type-1 leaning.
Leaning apply_sentiment(double unscaled, double tau, SentimentMode mode);

struct LabelSummary {
    std::array<std::size_t, 3> counts{}; // indexed by class_index
    std::size_t unlabeled = 0;

    std::size_t count(Leaning l) const { return counts[class_index(l)]; }
    std::size_t labeled() const { return counts[0] + counts[1] + counts[2]; }
    void merge(const LabelSummary& other);
};

struct LabelConfig {
    LabelMethod method = LabelMethod::Type1;
    SentimentLexicons lexicons;
};

struct LabelRun {
    std::vector<LabeledPost> labeled;
    LabelSummary summary;
};

std::optional<LabeledPost> label_post(const Post& post, const BiasRegistry& registry,
                                      const LabelConfig& config);

LabelRun label_corpus(const std::vector<Post>& posts, const BiasRegistry& registry,
                      const LabelConfig& config);

} // namespace leanlab
