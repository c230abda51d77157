#include "leanlab/labeler.hpp"

#include <cmath>

namespace leanlab {

namespace {
constexpr double kBand = 0.1;
}

std::string_view to_string(LabelMethod m) {
    switch (m) {
    case LabelMethod::Type1: return "type1";
    case LabelMethod::Type2Flip: return "type2_flip";
    case LabelMethod::Type2Scale: return "type2_scale";
    }
    return "type1";
}

std::optional<double> unscaled_leaning(std::span<const Leaning> domains) {
    if (domains.empty()) return std::nullopt;
    int sum = 0;
    for (Leaning l : domains) sum += code(l);
    return static_cast<double>(sum) / static_cast<double>(domains.size());
}

Leaning threshold(double p_hat) {
    if (p_hat <= -kBand) return Leaning::Left;
    if (p_hat >= kBand) return Leaning::Right;
    return Leaning::Center;
}

std::vector<Leaning> known_leanings(const Post& post, const BiasRegistry& registry) {
    std::vector<Leaning> out;
    for (const auto& d : post_domains(post, registry)) {
        if (d.leaning) out.push_back(*d.leaning);
    }
    return out;
}

std::optional<LabeledPost> label_type1(const Post& post, const BiasRegistry& registry) {
    const auto leanings = known_leanings(post, registry);
    const auto p_hat = unscaled_leaning(leanings);
    if (!p_hat) return std::nullopt;
    LabeledPost out;
    out.post_id = post.id;
    out.unscaled = *p_hat;
    out.label = threshold(*p_hat);
    out.method = LabelMethod::Type1;
    out.domain_count = leanings.size();
    return out;
}

Leaning apply_sentiment(double unscaled, double tau, SentimentMode mode) {
    if (mode == SentimentMode::Scale) return threshold(unscaled * tau);
    const Leaning base = threshold(unscaled);
    if (tau < 0.0 && base != Leaning::Center) return opposite(base);
    return base;
}

std::optional<LabeledPost> label_type2(const Post& post, const BiasRegistry& registry,
                                       const SentimentScore& score, SentimentMode mode) {
    auto out = label_type1(post, registry);
    if (!out) return std::nullopt;
    out->tau = score.tau;
    out->label = apply_sentiment(out->unscaled, score.tau, mode);
    if (mode == SentimentMode::Scale) {
        out->adjusted = out->unscaled * score.tau;
        out->method = LabelMethod::Type2Scale;
    } else {
        out->method = LabelMethod::Type2Flip;
    }
    return out;
}

void LabelSummary::merge(const LabelSummary& other) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    unlabeled += other.unlabeled;
}

std::optional<LabeledPost> label_post(const Post& post, const BiasRegistry& registry,
                                      const LabelConfig& config) {
    switch (config.method) {
    case LabelMethod::Type1: return label_type1(post, registry);
    case LabelMethod::Type2Flip:
    case LabelMethod::Type2Scale: {
        const auto score = analyze_sentiment(post.text, config.lexicons);
        const auto mode =
            config.method == LabelMethod::Type2Flip ? SentimentMode::Flip : SentimentMode::Scale;
        return label_type2(post, registry, score, mode);
    }
    }
    return std::nullopt;
}

LabelRun label_corpus(const std::vector<Post>& posts, const BiasRegistry& registry,
                      const LabelConfig& config) {
    LabelRun run;
    for (const auto& post : posts) {
        auto labeled = label_post(post, registry, config);
        if (!labeled) {
            ++run.summary.unlabeled;
            continue;
        }
        ++run.summary.counts[class_index(labeled->label)];
        run.labeled.push_back(std::move(*labeled));
    }
    return run;
}

} // namespace leanlab
