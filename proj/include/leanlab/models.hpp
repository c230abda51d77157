#pragma once

#include "leanlab/features.hpp"
#include "leanlab/leaning.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leanlab {

/// Labeled feature rows. Row i of features carries labels[i].
struct Dataset {
    FeatureMatrix features;
    std::vector<Leaning> labels;

    std::size_t size() const { return labels.size(); }
    const std::vector<std::string>& ids() const { return features.row_ids; }
    Dataset subset(std::span<const std::size_t> rows) const;
    /// Throws std::invalid_argument when lengths disagree.
    void validate() const;
};

/// Classes present in the labels, in Left, Center, Right order.
std::vector<Leaning> present_classes(std::span<const Leaning> labels);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified, seeded split. The train side receives round(ratio * n) rows,
/// allotted to classes by largest remainder. Throws std::invalid_argument
/// when ratio is outside (0, 1) or a class has fewer than two members.
SplitIndices split_indices(std::span<const Leaning> labels, double ratio, std::uint64_t seed);

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double ratio = 0.8,
                                             std::uint64_t seed = 1);

/// Row indices of exactly per_class rows of every class present, sampled
/// without replacement. Throws std::invalid_argument naming a short class.
std::vector<std::size_t> few_shot_indices(std::span<const Leaning> labels, std::size_t per_class,
                                          std::uint64_t seed);

Dataset few_shot_sample(const Dataset& data, std::size_t per_class, std::uint64_t seed);

enum class ModelKind { GaussianNB, LogisticRegression, Svm, NeuralNet };
enum class SvmKernel { Linear, Rbf };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view text);
std::string_view to_string(SvmKernel k);
std::optional<SvmKernel> parse_kernel(std::string_view text);

struct TrainConfig {
    ModelKind kind = ModelKind::LogisticRegression;
    double C = 1.0;
    double learning_rate = 1e-6;     // neural net (Adam)
    int epochs = 0;                  // 0 selects the per-model default
    int batch_size = 32;
    std::uint64_t seed = 1;
    std::array<int, 3> hidden{128, 64, 32};
    SvmKernel kernel = SvmKernel::Linear;
    double tolerance = 1e-5;         // logistic regression gradient max-norm
    long long max_dual_iterations = 10'000'000;

    /// epochs if set, otherwise the default for kind.
    int effective_epochs() const;
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct TrainStatus {
    bool converged = true;
    long long iterations = 0;
    std::string message;
};

/// A trained classifier. Instances are immutable after training.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual ModelKind kind() const = 0;
    virtual bool has_probabilities() const = 0;

    const std::vector<Leaning>& classes() const { return classes_; }
    Eigen::Index input_dimension() const { return dim_; }
    const TrainStatus& status() const { return status_; }
    void set_status(TrainStatus s) { status_ = std::move(s); }

    /// n x classes() scores; larger is more likely. Throws on a dimension mismatch.
    DenseRows decision_scores(const SparseRows& x) const;

    /// Rows sum to one. Throws std::logic_error for models without probabilities.
    DenseRows predict_proba(const SparseRows& x) const;

    /// Argmax over classes; ties go to the lower class code.
    std::vector<Leaning> predict(const SparseRows& x) const;

    nlohmann::json to_json() const;
    static std::unique_ptr<Classifier> from_json(const nlohmann::json& j);

protected:
    Classifier(std::vector<Leaning> classes, Eigen::Index dim) : classes_(std::move(classes)), dim_(dim) {}

    virtual DenseRows raw_scores(const SparseRows& x) const = 0;
    virtual DenseRows raw_proba(const SparseRows& x) const;
    virtual nlohmann::json params_json() const = 0;

    std::vector<Leaning> classes_;
    Eigen::Index dim_ = 0;
    TrainStatus status_;

private:
    void check_dimension(const SparseRows& x) const;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

class GaussianNB final : public Classifier {
public:
    GaussianNB(std::vector<Leaning> classes, Eigen::VectorXd log_prior, DenseRows means, DenseRows variances);

    ModelKind kind() const override { return ModelKind::GaussianNB; }
    bool has_probabilities() const override { return true; }

    const Eigen::VectorXd& log_prior() const { return log_prior_; }
    const DenseRows& means() const { return means_; }
    const DenseRows& variances() const { return vars_; }

    /// Joint log likelihood per class: log prior + sum of log Gaussian densities.
    DenseRows joint_log_likelihood(const SparseRows& x) const;

    static std::unique_ptr<GaussianNB> from_params(const nlohmann::json& j);

protected:
    DenseRows raw_scores(const SparseRows& x) const override;
    DenseRows raw_proba(const SparseRows& x) const override;
    nlohmann::json params_json() const override;

private:
    Eigen::VectorXd log_prior_;
    DenseRows means_;
    DenseRows vars_;
};

/// Variance floor is 1e-9 times the largest per-feature variance (1e-9 when
/// every feature is constant).
std::unique_ptr<GaussianNB> train_gnb(const Dataset& train);

// ---------------------------------------------------------------------------
// Multinomial logistic regression
// ---------------------------------------------------------------------------

class LogisticRegression final : public Classifier {
public:
    LogisticRegression(std::vector<Leaning> classes, DenseRows weights, Eigen::VectorXd bias);

    ModelKind kind() const override { return ModelKind::LogisticRegression; }
    bool has_probabilities() const override { return true; }
    const DenseRows& weights() const { return w_; }
    const Eigen::VectorXd& bias() const { return b_; }

    static std::unique_ptr<LogisticRegression> from_params(const nlohmann::json& j);

protected:
    DenseRows raw_scores(const SparseRows& x) const override;
    DenseRows raw_proba(const SparseRows& x) const override;
    nlohmann::json params_json() const override;

private:
    DenseRows w_; // classes x features
    Eigen::VectorXd b_;
};

/// Summed cross-entropy plus ||W||^2 / (2C); the bias is not penalized.
/// y holds class positions. Gradients are written when the pointers are set.
double logreg_objective(const DenseRows& weights, const Eigen::VectorXd& bias, const SparseRows& x,
                        std::span<const int> y, double C, DenseRows* grad_w = nullptr,
                        Eigen::VectorXd* grad_b = nullptr);

/// Full-batch gradient descent with backtracking line search. Stops when the
/// gradient max-norm drops below config.tolerance or after the epoch cap.
std::unique_ptr<LogisticRegression> train_logreg(const Dataset& train, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Support vector machines (one-vs-rest)
// ---------------------------------------------------------------------------

class LinearSvm final : public Classifier {
public:
    LinearSvm(std::vector<Leaning> classes, DenseRows weights, Eigen::VectorXd bias);

    ModelKind kind() const override { return ModelKind::Svm; }
    bool has_probabilities() const override { return false; }
    const DenseRows& weights() const { return w_; }
    const Eigen::VectorXd& bias() const { return b_; }

    static std::unique_ptr<LinearSvm> from_params(const nlohmann::json& j);

protected:
    DenseRows raw_scores(const SparseRows& x) const override;
    nlohmann::json params_json() const override;

private:
    DenseRows w_;
    Eigen::VectorXd b_;
};

class KernelSvm final : public Classifier {
public:
    KernelSvm(std::vector<Leaning> classes, double gamma, SparseRows support, DenseRows coef,
              Eigen::VectorXd rho);

    ModelKind kind() const override { return ModelKind::Svm; }
    bool has_probabilities() const override { return false; }
    double gamma() const { return gamma_; }
    Eigen::Index support_count() const { return support_.rows(); }

    static std::unique_ptr<KernelSvm> from_params(const nlohmann::json& j);

protected:
    DenseRows raw_scores(const SparseRows& x) const override;
    nlohmann::json params_json() const override;

private:
    double gamma_;
    SparseRows support_;      // support vectors
    DenseRows coef_;          // classes x support: alpha_i * y_i per binary problem
    Eigen::VectorXd rho_;     // decision = coef . k(sv, x) - rho
    Eigen::VectorXd sv_sqnorm_;
};

inline constexpr std::size_t kMaxKernelRows = 20'000;

/// Linear: Pegasos SGD on hinge loss with lambda = 1 / (C n), bias folded in
/// as a constant feature. RBF: SMO on the dual with gamma = 1 / (dim * var(X)).
/// Throws std::invalid_argument for RBF on more than kMaxKernelRows rows.
std::unique_ptr<Classifier> train_svm(const Dataset& train, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Feedforward network
// ---------------------------------------------------------------------------

/// Dense layers; all but the last use ReLU, the last feeds a softmax.
struct MlpParams {
    std::vector<DenseRows> weights;      // fan_in x fan_out
    std::vector<Eigen::RowVectorXd> biases;

    static MlpParams zeros_like(const MlpParams& p);
    std::size_t parameter_count() const;
};

/// Mean cross-entropy over the rows of x. Fills grad when given.
double mlp_loss_grad(const MlpParams& params, const SparseRows& x, std::span<const int> y,
                     MlpParams* grad = nullptr);

/// He-initialized parameters for the given layer widths.
MlpParams init_mlp(std::span<const int> widths, std::uint64_t seed);

class NeuralNet final : public Classifier {
public:
    NeuralNet(std::vector<Leaning> classes, Eigen::Index dim, MlpParams params);

    ModelKind kind() const override { return ModelKind::NeuralNet; }
    bool has_probabilities() const override { return true; }
    const MlpParams& params() const { return params_; }

    static std::unique_ptr<NeuralNet> from_params(const nlohmann::json& j);

protected:
    DenseRows raw_scores(const SparseRows& x) const override;
    DenseRows raw_proba(const SparseRows& x) const override;
    nlohmann::json params_json() const override;

private:
    MlpParams params_;
};

/// Three ReLU hidden layers and a softmax head trained with Adam
/// (beta1 0.9, beta2 0.999, eps 1e-8) on shuffled mini-batches.
std::unique_ptr<NeuralNet> train_nn(const Dataset& train, const TrainConfig& config);

/// Dispatches on config.kind.
std::unique_ptr<Classifier> train_classifier(const Dataset& train, const TrainConfig& config);

} // namespace leanlab
