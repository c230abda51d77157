#pragma once

#include "leanlab/bias_registry.hpp"
#include "leanlab/features.hpp"
#include "leanlab/ingest.hpp"
#include "leanlab/io.hpp"
#include "leanlab/labeler.hpp"
#include "leanlab/leaning.hpp"
#include "leanlab/models.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace leanlab {

/// counts[actual][predicted], both indexed by class_index.
using ConfusionMatrix = std::array<std::array<std::size_t, 3>, 3>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool zero_division = false; // some denominator was 0 and the value was set to 0
};

struct EvalReport {
    std::size_t total = 0;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::array<ClassMetrics, 3> per_class{}; // indexed by class_index
    ConfusionMatrix confusion{};
};

/// Throws std::invalid_argument on a length mismatch or empty input.
ConfusionMatrix confusion_matrix(std::span<const Leaning> predicted, std::span<const Leaning> actual);
EvalReport compute_metrics(std::span<const Leaning> predicted, std::span<const Leaning> actual);

nlohmann::json to_json(const EvalReport& r);
/// Rows actual, columns predicted, with a header row and a label column.
std::string confusion_csv(const ConfusionMatrix& m);
std::string per_class_csv(const EvalReport& r);

struct AgreementReport {
    std::array<std::size_t, 3> matches{}; // by human class
    std::array<std::size_t, 3> samples{}; // human-labeled posts per class
    std::size_t total_matches = 0;
    std::size_t total = 0;
    double rate = 0.0;
};

/// Joins on post id. Every human-labeled id must have a heuristic label;
/// otherwise DataError lists the missing ids.
AgreementReport agreement(std::span<const LabeledPost> heuristic, std::span<const HumanLabel> human);
nlohmann::json to_json(const AgreementReport& r);

/// Class histogram of a labeling run, `label,count` rows.
std::string label_distribution_csv(const LabelSummary& s);
std::string top_domains_csv(const std::vector<std::pair<std::string, std::size_t>>& rows);

/// Posts paired with their heuristic labels, in corpus order.
struct LabeledTexts {
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    std::vector<Leaning> labels;
};

/// Keeps the posts that have a label; labels for unknown ids are ignored.
LabeledTexts join_labels(const std::vector<Post>& posts, const std::vector<LabeledPost>& labeled);

struct GridConfig {
    std::vector<RepresentationKind> representations{RepresentationKind::Count, RepresentationKind::Tfidf,
                                                    RepresentationKind::Word2Vec};
    std::vector<TrainConfig> models;
    double split_ratio = 0.8;
    std::uint64_t seed = 1;
    EmbeddingConfig embedding;
    bool parallel = true;
};

/// Default model columns: SVM, logistic regression, naive Bayes, neural net.
std::vector<TrainConfig> default_grid_models(std::uint64_t seed);

struct GridCell {
    RepresentationKind representation = RepresentationKind::Count;
    TrainConfig model;
    std::optional<EvalReport> report;
    std::string error;
    TrainStatus status;
};

struct GridResult {
    std::vector<RepresentationKind> representations;
    std::vector<TrainConfig> models;
    std::vector<GridCell> cells; // row-major: representation, then model
    std::size_t train_size = 0;
    std::size_t test_size = 0;

    const GridCell& cell(std::size_t rep, std::size_t model) const { return cells.at(rep * models.size() + model); }
};

/// Split once, then for every (representation, model) cell fit the
/// representation on the training texts, train and evaluate on the test
/// texts. A failing cell records its error and the grid continues.
GridResult benchmark_grid(const LabeledTexts& data, const GridConfig& config);

/// Labels the corpus first, then runs the grid.
GridResult benchmark_grid(const std::vector<Post>& posts, const BiasRegistry& registry,
                          const LabelConfig& labeling, const GridConfig& config);

nlohmann::json to_json(const GridResult& g);
/// Accuracy fractions; rows are representations, columns models.
std::string grid_csv(const GridResult& g);

/// Column name used for a model in grid tables.
std::string model_column(const TrainConfig& c);

} // namespace leanlab
