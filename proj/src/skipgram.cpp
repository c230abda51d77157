#include "leanlab/features.hpp"

#include "leanlab/hash.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace leanlab {

using nlohmann::json;

namespace {

constexpr double kMinLearningRateFraction = 1e-4;
constexpr double kUnigramPower = 0.75;

double log_sigmoid(double x) {
    // log(1 / (1 + e^-x)) without overflow
    return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Draws indices proportionally to count^0.75.
class NegativeSampler {
public:
    explicit NegativeSampler(const std::vector<std::size_t>& counts) {
        double total = 0.0;
        cumulative_.reserve(counts.size());
        for (auto c : counts) {
            total += std::pow(static_cast<double>(c), kUnigramPower);
            cumulative_.push_back(total);
        }
    }

    template <typename Rng>
    Eigen::Index draw(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, cumulative_.back());
        const double x = u(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        if (it == cumulative_.end()) --it;
        return static_cast<Eigen::Index>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

} // namespace

void EmbeddingConfig::validate() const {
    if (dimension < 2) throw std::invalid_argument("embedding dimension must be at least 2");
    if (window < 1 || negatives < 1 || epochs < 1 || min_count < 1) {
        throw std::invalid_argument("embedding window, negatives, epochs and min_count must be positive");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("embedding learning rate must be finite and non-negative");
    }
}

json to_json(const EmbeddingConfig& c) {
    return {{"dimension", c.dimension}, {"window", c.window},       {"negatives", c.negatives},
            {"epochs", c.epochs},       {"learning_rate", c.learning_rate}, {"min_count", c.min_count},
            {"seed", c.seed}};
}

EmbeddingConfig embedding_config_from_json(const json& j) {
    EmbeddingConfig c;
    c.dimension = j.value("dimension", c.dimension);
    c.window = j.value("window", c.window);
    c.negatives = j.value("negatives", c.negatives);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.min_count = j.value("min_count", c.min_count);
    c.seed = j.value("seed", c.seed);
    return c;
}

double sgns_loss_grad(const DenseRows& input, const DenseRows& output, Eigen::Index center,
                      Eigen::Index context, std::span<const Eigen::Index> negatives,
                      Eigen::VectorXd& grad_center, DenseRows& grad_outputs) {
    const Eigen::Index d = input.cols();
    grad_center.setZero(d);
    grad_outputs.resize(static_cast<Eigen::Index>(negatives.size()) + 1, d);

    const auto v = input.row(center);
    double loss = 0.0;
    auto term = [&](Eigen::Index out_row, Eigen::Index grad_row, double target) {
        const auto u = output.row(out_row);
        const double score = v.dot(u);
        // target 1: -log s(score); target 0: -log s(-score)
        loss -= target > 0.5 ? log_sigmoid(score) : log_sigmoid(-score);
        const double g = sigmoid(score) - target;
        grad_center += g * u.transpose();
        grad_outputs.row(grad_row) = g * v;
    };
    term(context, 0, 1.0);
    for (std::size_t k = 0; k < negatives.size(); ++k) {
        term(negatives[k], static_cast<Eigen::Index>(k) + 1, 0.0);
    }
    return loss;
}

EmbeddingModel train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const EmbeddingConfig& config) {
    config.validate();

    std::map<std::string, std::size_t> freq;
    for (const auto& s : sentences) {
        for (const auto& t : s) ++freq[t];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [w, c] : freq) {
        if (c >= static_cast<std::size_t>(config.min_count)) kept.emplace_back(w, c);
    }
    if (kept.empty()) throw std::invalid_argument("no token reaches the minimum count");
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<std::string> words;
    std::vector<std::size_t> counts;
    std::unordered_map<std::string, Eigen::Index> index;
    for (const auto& [w, c] : kept) {
        index.emplace(w, static_cast<Eigen::Index>(words.size()));
        words.push_back(w);
        counts.push_back(c);
    }

    std::vector<std::vector<Eigen::Index>> encoded;
    std::size_t total_tokens = 0;
    for (const auto& s : sentences) {
        std::vector<Eigen::Index> ids;
        for (const auto& t : s) {
            if (auto it = index.find(t); it != index.end()) ids.push_back(it->second);
        }
        total_tokens += ids.size();
        if (ids.size() > 1) encoded.push_back(std::move(ids));
    }

    const auto vocab = static_cast<Eigen::Index>(words.size());
    const Eigen::Index dim = config.dimension;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(dim), 0.5 / static_cast<double>(dim));
    DenseRows input(vocab, dim);
    for (Eigen::Index r = 0; r < vocab; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) input(r, c) = init(rng);
    }
    DenseRows output = DenseRows::Zero(vocab, dim);

    const NegativeSampler sampler(counts);
    const double planned = static_cast<double>(config.epochs) * static_cast<double>(std::max<std::size_t>(total_tokens, 1));
    double processed = 0.0;
    std::vector<Eigen::Index> negatives;
    Eigen::VectorXd grad_center(dim);
    DenseRows grad_outputs(config.negatives + 1, dim);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& sent : encoded) {
            const auto n = static_cast<std::ptrdiff_t>(sent.size());
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                const double lr =
                    config.learning_rate * std::max(kMinLearningRateFraction, 1.0 - processed / planned);
                processed += 1.0;
                const Eigen::Index center = sent[i];
                const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - config.window);
                const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + config.window);
                for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const Eigen::Index context = sent[j];
                    negatives.clear();
                    for (int k = 0; k < config.negatives; ++k) {
                        const Eigen::Index neg = sampler.draw(rng);
                        if (neg != context) negatives.push_back(neg);
                    }
                    sgns_loss_grad(input, output, center, context, negatives, grad_center, grad_outputs);
                    output.row(context) -= lr * grad_outputs.row(0);
                    for (std::size_t k = 0; k < negatives.size(); ++k) {
                        output.row(negatives[k]) -= lr * grad_outputs.row(static_cast<Eigen::Index>(k) + 1);
                    }
                    input.row(center) -= lr * grad_center.transpose();
                }
            }
        }
    }
    return EmbeddingModel(config, std::move(words), std::move(input), std::move(output));
}

// ---------------------------------------------------------------------------
// EmbeddingModel
// ---------------------------------------------------------------------------

EmbeddingModel::EmbeddingModel(EmbeddingConfig config, std::vector<std::string> words, DenseRows input,
                               DenseRows output)
    : config_(config), words_(std::move(words)), input_(std::move(input)), output_(std::move(output)) {
    const auto n = static_cast<Eigen::Index>(words_.size());
    if (input_.rows() != n || output_.rows() != n || input_.cols() != config_.dimension ||
        output_.cols() != config_.dimension) {
        throw std::invalid_argument("embedding table shape mismatch");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

std::optional<std::size_t> EmbeddingModel::index(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<Eigen::VectorXd> EmbeddingModel::vector(std::string_view word) const {
    auto i = index(word);
    if (!i) return std::nullopt;
    return Eigen::VectorXd(input_.row(static_cast<Eigen::Index>(*i)).transpose());
}

double EmbeddingModel::cosine(std::string_view a, std::string_view b) const {
    auto ia = index(a);
    auto ib = index(b);
    if (!ia || !ib) throw std::invalid_argument("cosine of out-of-vocabulary word");
    const auto ra = static_cast<Eigen::Index>(*ia);
    const auto rb = static_cast<Eigen::Index>(*ib);
    const Eigen::RowVectorXd va = input_.row(ra) + output_.row(ra);
    const Eigen::RowVectorXd vb = input_.row(rb) + output_.row(rb);
    const double denom = va.norm() * vb.norm();
    return denom > 0.0 ? va.dot(vb) / denom : 0.0;
}

Eigen::VectorXd EmbeddingModel::embed_post(const std::vector<std::string>& tokens) const {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(config_.dimension);
    std::size_t n = 0;
    for (const auto& t : tokens) {
        if (auto i = index(t)) {
            sum += input_.row(static_cast<Eigen::Index>(*i)).transpose();
            ++n;
        }
    }
    if (n > 0) sum /= static_cast<double>(n);
    return sum;
}

std::string EmbeddingModel::vocabulary_hash() const {
    std::string joined;
    for (const auto& w : words_) {
        joined += w;
        joined.push_back('\n');
    }
    return sha256_hex(joined);
}

std::vector<std::pair<Eigen::Index, double>> EmbeddingModel::encode(const std::vector<std::string>& tokens) const {
    const Eigen::VectorXd v = embed_post(tokens);
    std::vector<std::pair<Eigen::Index, double>> out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) out.emplace_back(i, v[i]);
    }
    return out;
}

json EmbeddingModel::to_json() const {
    auto rows = [](const DenseRows& m) {
        json out = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::vector<double> row(m.row(r).data(), m.row(r).data() + m.cols());
            out.push_back(std::move(row));
        }
        return out;
    };
    return {{"format_version", 1},
            {"kind", "w2v"},
            {"config", leanlab::to_json(config_)},
            {"words", words_},
            {"input", rows(input_)},
            {"output", rows(output_)}};
}

EmbeddingModel EmbeddingModel::from_json(const json& j) {
    if (j.value("format_version", 0) != 1 || j.value("kind", std::string{}) != "w2v") {
        throw std::invalid_argument("not a version-1 w2v embedding");
    }
    const auto config = embedding_config_from_json(j.at("config"));
    auto words = j.at("words").get<std::vector<std::string>>();
    auto table = [&](const json& rows) {
        DenseRows m(static_cast<Eigen::Index>(rows.size()), config.dimension);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto row = rows[r].get<std::vector<double>>();
            if (row.size() != static_cast<std::size_t>(config.dimension)) {
                throw std::invalid_argument("embedding row width mismatch");
            }
            for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
        return m;
    };
    return EmbeddingModel(config, std::move(words), table(j.at("input")), table(j.at("output")));
}

} // namespace leanlab
