#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace leanlab {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using DenseRows = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lowercase word tokens for text representations. URLs and @mentions are
/// removed, '#' is stripped from hashtags, text is split on anything that is
/// not alphanumeric and tokens shorter than two bytes are dropped. Bytes of
/// multi-byte UTF-8 sequences count as alphanumeric.
std::vector<std::string> tokenize(std::string_view text);

/// Dense token index with document frequencies. Indices follow the
/// lexicographic order of the tokens.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary build(const std::vector<std::vector<std::string>>& docs);
    static Vocabulary from_parts(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq,
                                 std::size_t doc_count);

    std::optional<std::size_t> index(std::string_view token) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::size_t document_frequency(std::size_t i) const { return doc_freq_.at(i); }
    const std::vector<std::size_t>& document_frequencies() const { return doc_freq_; }
    std::size_t document_count() const { return doc_count_; }

    /// SHA-256 of the newline-joined token list.
    std::string hash() const;

private:
    void reindex();

    std::vector<std::string> tokens_;
    std::vector<std::size_t> doc_freq_;
    std::size_t doc_count_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Post-by-feature matrix with the post id of every row.
struct FeatureMatrix {
    SparseRows values;
    std::vector<std::string> row_ids;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
    DenseRows dense() const { return DenseRows(values); }
    FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
};

enum class RepresentationKind { Count, Tfidf, Word2Vec };

std::string_view to_string(RepresentationKind k);
std::optional<RepresentationKind> parse_representation(std::string_view text);

/// A fitted text representation. Fitted instances are immutable.
class Vectorizer {
public:
    virtual ~Vectorizer() = default;

    virtual RepresentationKind kind() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string vocabulary_hash() const = 0;

    /// Feature entries for one tokenized post, as (column, value) pairs
    /// in increasing column order.
    virtual std::vector<std::pair<Eigen::Index, double>> encode(
        const std::vector<std::string>& tokens) const = 0;

    virtual nlohmann::json to_json() const = 0;

    FeatureMatrix transform(const std::vector<std::string>& texts,
                            const std::vector<std::string>& ids) const;

    static std::unique_ptr<Vectorizer> from_json(const nlohmann::json& j);
};

class CountVectorizer : public Vectorizer {
public:
    /// Throws std::invalid_argument on an empty corpus.
    void fit(const std::vector<std::vector<std::string>>& docs);
    bool fitted() const { return fitted_; }
    const Vocabulary& vocabulary() const { return vocab_; }

    /// Throws std::logic_error before fit().
    Eigen::SparseVector<double> transform_count(const std::vector<std::string>& tokens) const;

    RepresentationKind kind() const override { return RepresentationKind::Count; }
    std::size_t dimension() const override { return vocab_.size(); }
    std::string vocabulary_hash() const override { return vocab_.hash(); }
    std::vector<std::pair<Eigen::Index, double>> encode(
        const std::vector<std::string>& tokens) const override;
    nlohmann::json to_json() const override;
    static CountVectorizer from_json(const nlohmann::json& j);

private:
    Vocabulary vocab_;
    bool fitted_ = false;
};

/// tf * (ln((1 + N) / (1 + df)) + 1), rows L2-normalized.
class TfidfVectorizer : public Vectorizer {
public:
    void fit(const std::vector<std::vector<std::string>>& docs);
    bool fitted() const { return fitted_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<double>& idf() const { return idf_; }

    Eigen::SparseVector<double> transform_tfidf(const std::vector<std::string>& tokens) const;

    RepresentationKind kind() const override { return RepresentationKind::Tfidf; }
    std::size_t dimension() const override { return vocab_.size(); }
    std::string vocabulary_hash() const override { return vocab_.hash(); }
    std::vector<std::pair<Eigen::Index, double>> encode(
        const std::vector<std::string>& tokens) const override;
    nlohmann::json to_json() const override;
    static TfidfVectorizer from_json(const nlohmann::json& j);

private:
    Vocabulary vocab_;
    std::vector<double> idf_;
    bool fitted_ = false;
};

struct EmbeddingConfig {
    int dimension = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025; // decays linearly to lr * 1e-4
    int min_count = 2;
    std::uint64_t seed = 1;

    void validate() const;
};

nlohmann::json to_json(const EmbeddingConfig& c);
EmbeddingConfig embedding_config_from_json(const nlohmann::json& j);

/// Skip-gram word vectors. Input vectors are the word embeddings; output
/// vectors are the context-side parameters.
class EmbeddingModel : public Vectorizer {
public:
    EmbeddingModel() = default;
    EmbeddingModel(EmbeddingConfig config, std::vector<std::string> words, DenseRows input,
                   DenseRows output);

    const EmbeddingConfig& config() const { return config_; }
    const std::vector<std::string>& words() const { return words_; }
    const DenseRows& input_vectors() const { return input_; }
    const DenseRows& output_vectors() const { return output_; }
    std::optional<std::size_t> index(std::string_view word) const;

    /// Input vector of a word, or nullopt when out of vocabulary.
    std::optional<Eigen::VectorXd> vector(std::string_view word) const;
    /// Cosine similarity of the summed input and output vectors of two words.
    double cosine(std::string_view a, std::string_view b) const;

    /// Mean input vector of in-vocabulary tokens, zero when there are none.
    Eigen::VectorXd embed_post(const std::vector<std::string>& tokens) const;

    RepresentationKind kind() const override { return RepresentationKind::Word2Vec; }
    std::size_t dimension() const override { return static_cast<std::size_t>(config_.dimension); }
    std::string vocabulary_hash() const override;
    std::vector<std::pair<Eigen::Index, double>> encode(
        const std::vector<std::string>& tokens) const override;
    nlohmann::json to_json() const override;
    static EmbeddingModel from_json(const nlohmann::json& j);

private:
    EmbeddingConfig config_;
    std::vector<std::string> words_;
    DenseRows input_;
    DenseRows output_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Negative-sampling loss for one (center, context, negatives) tuple:
/// -log s(v_c . u_o) - sum_k log s(-v_c . u_k), with s the logistic function.
/// Writes d loss / d v_c into grad_center and, row by row, the gradients for
/// the context row followed by each negative row into grad_outputs.
double sgns_loss_grad(const DenseRows& input, const DenseRows& output, Eigen::Index center,
                      Eigen::Index context, std::span<const Eigen::Index> negatives,
                      Eigen::VectorXd& grad_center, DenseRows& grad_outputs);

/// Sequential, seed-deterministic skip-gram training with negative sampling.
/// Throws std::invalid_argument when no token reaches min_count.
EmbeddingModel train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const EmbeddingConfig& config);

/// Convenience: fit a representation on tokenized training posts.
std::unique_ptr<Vectorizer> fit_representation(RepresentationKind kind,
                                               const std::vector<std::vector<std::string>>& docs,
                                               const EmbeddingConfig& embedding = {});

} // namespace leanlab
