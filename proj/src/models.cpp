#include "leanlab/models.hpp"

#include "model_support.hpp"
#include "strings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace leanlab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset, splits, sampling
// ---------------------------------------------------------------------------

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features = features.select_rows(rows);
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(labels.at(r));
    return out;
}

void Dataset::validate() const {
    if (static_cast<std::size_t>(features.rows()) != labels.size() || features.row_ids.size() != labels.size()) {
        throw std::invalid_argument("dataset features, ids and labels differ in length");
    }
}

std::vector<Leaning> present_classes(std::span<const Leaning> labels) {
    std::array<bool, 3> seen{};
    for (Leaning l : labels) seen[class_index(l)] = true;
    std::vector<Leaning> out;
    for (std::size_t i = 0; i < 3; ++i) {
        if (seen[i]) out.push_back(leaning_from_index(i));
    }
    return out;
}

namespace {

std::array<std::vector<std::size_t>, 3> indices_by_class(std::span<const Leaning> labels) {
    std::array<std::vector<std::size_t>, 3> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[class_index(labels[i])].push_back(i);
    return by_class;
}

} // namespace

SplitIndices split_indices(std::span<const Leaning> labels, double ratio, std::uint64_t seed) {
    if (labels.empty()) throw std::invalid_argument("cannot split an empty dataset");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie strictly between 0 and 1");

    auto by_class = indices_by_class(labels);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < 3; ++k) {
        if (by_class[k].empty()) continue;
        if (by_class[k].size() < 2) {
            throw std::invalid_argument("class '" + std::string(to_string(leaning_from_index(k))) +
                                        "' has fewer than two members and cannot be stratified");
        }
        std::shuffle(by_class[k].begin(), by_class[k].end(), rng);
    }

    // Largest-remainder allotment of round(ratio * n) training rows.
    const auto total_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(labels.size())));
    std::array<std::size_t, 3> take{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double exact = ratio * static_cast<double>(by_class[k].size());
        take[k] = static_cast<std::size_t>(std::floor(exact));
        remainder[k] = exact - std::floor(exact);
        assigned += take[k];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t k : order) {
        if (assigned >= total_train) break;
        if (take[k] < by_class[k].size()) {
            ++take[k];
            ++assigned;
        }
    }
    SplitIndices split;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto n = by_class[k].size();
        if (n == 0) continue;
        take[k] = std::clamp<std::size_t>(take[k], 1, n - 1);
        split.train.insert(split.train.end(), by_class[k].begin(), by_class[k].begin() + static_cast<std::ptrdiff_t>(take[k]));
        split.test.insert(split.test.end(), by_class[k].begin() + static_cast<std::ptrdiff_t>(take[k]), by_class[k].end());
    }
    std::shuffle(split.train.begin(), split.train.end(), rng);
    std::shuffle(split.test.begin(), split.test.end(), rng);
    return split;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double ratio, std::uint64_t seed) {
    data.validate();
    const auto idx = split_indices(data.labels, ratio, seed);
    return {data.subset(idx.train), data.subset(idx.test)};
}

std::vector<std::size_t> few_shot_indices(std::span<const Leaning> labels, std::size_t per_class,
                                          std::uint64_t seed) {
    if (per_class == 0) throw std::invalid_argument("per_class must be positive");
    auto by_class = indices_by_class(labels);
    for (std::size_t k = 0; k < 3; ++k) {
        if (!by_class[k].empty() && by_class[k].size() < per_class) {
            throw std::invalid_argument("class '" + std::string(to_string(leaning_from_index(k))) + "' has " +
                                        std::to_string(by_class[k].size()) + " rows, fewer than the " +
                                        std::to_string(per_class) + " requested");
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    for (auto& members : by_class) {
        if (members.empty()) continue;
        std::shuffle(members.begin(), members.end(), rng);
        out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

Dataset few_shot_sample(const Dataset& data, std::size_t per_class, std::uint64_t seed) {
    data.validate();
    const auto idx = few_shot_indices(data.labels, per_class, seed);
    return data.subset(idx);
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::GaussianNB: return "gnb";
    case ModelKind::LogisticRegression: return "logreg";
    case ModelKind::Svm: return "svm";
    case ModelKind::NeuralNet: return "nn";
    }
    return "logreg";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "gnb" || t == "nb") return ModelKind::GaussianNB;
    if (t == "logreg" || t == "lr") return ModelKind::LogisticRegression;
    if (t == "svm") return ModelKind::Svm;
    if (t == "nn" || t == "mlp") return ModelKind::NeuralNet;
    return std::nullopt;
}

std::string_view to_string(SvmKernel k) { return k == SvmKernel::Rbf ? "rbf" : "linear"; }

std::optional<SvmKernel> parse_kernel(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "linear") return SvmKernel::Linear;
    if (t == "rbf") return SvmKernel::Rbf;
    return std::nullopt;
}

int TrainConfig::effective_epochs() const {
    if (epochs > 0) return epochs;
    switch (kind) {
    case ModelKind::GaussianNB: return 1;
    case ModelKind::LogisticRegression: return 1000;
    case ModelKind::Svm: return 20;
    case ModelKind::NeuralNet: return 20;
    }
    return 1;
}

void TrainConfig::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be positive");
    if (epochs < 0) throw std::invalid_argument("epochs must be at least 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be finite and non-negative");
    }
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("hidden layer sizes must be positive");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

json to_json(const TrainConfig& c) {
    return {{"kind", to_string(c.kind)},
            {"C", c.C},
            {"learning_rate", c.learning_rate},
            {"epochs", c.effective_epochs()},
            {"batch_size", c.batch_size},
            {"seed", c.seed},
            {"hidden", c.hidden},
            {"kernel", to_string(c.kernel)},
            {"tolerance", c.tolerance},
            {"max_dual_iterations", c.max_dual_iterations}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    if (j.contains("kind")) {
        auto k = parse_model_kind(j.at("kind").get<std::string>());
        if (!k) throw std::invalid_argument("unknown model kind");
        c.kind = *k;
    }
    c.C = j.value("C", c.C);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::array<int, 3>>();
    if (j.contains("kernel")) {
        auto k = parse_kernel(j.at("kernel").get<std::string>());
        if (!k) throw std::invalid_argument("unknown kernel");
        c.kernel = *k;
    }
    c.tolerance = j.value("tolerance", c.tolerance);
    c.max_dual_iterations = j.value("max_dual_iterations", c.max_dual_iterations);
    return c;
}

// ---------------------------------------------------------------------------
// Classifier base
// ---------------------------------------------------------------------------

void Classifier::check_dimension(const SparseRows& x) const {
    if (x.cols() != dim_) {
        throw std::invalid_argument("feature dimension " + std::to_string(x.cols()) +
                                    " does not match the trained dimension " + std::to_string(dim_));
    }
}

DenseRows Classifier::decision_scores(const SparseRows& x) const {
    check_dimension(x);
    return raw_scores(x);
}

DenseRows Classifier::raw_proba(const SparseRows&) const {
    throw std::logic_error("this classifier does not produce probabilities");
}

DenseRows Classifier::predict_proba(const SparseRows& x) const {
    check_dimension(x);
    if (!has_probabilities()) throw std::logic_error("predict_proba is unavailable for " + std::string(to_string(kind())));
    return raw_proba(x);
}

std::vector<Leaning> Classifier::predict(const SparseRows& x) const {
    check_dimension(x);
    const DenseRows scores = has_probabilities() ? raw_proba(x) : raw_scores(x);
    std::vector<Leaning> out;
    out.reserve(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < scores.cols(); ++k) {
            if (scores(r, k) > scores(r, best)) best = k;
        }
        out.push_back(classes_[static_cast<std::size_t>(best)]);
    }
    return out;
}

json Classifier::to_json() const {
    std::vector<std::string> names;
    for (Leaning l : classes_) names.emplace_back(to_string(l));
    json j = {{"format_version", 1},
              {"kind", to_string(kind())},
              {"classes", names},
              {"input_dimension", dim_},
              {"status", {{"converged", status_.converged}, {"iterations", status_.iterations}, {"message", status_.message}}},
              {"params", params_json()}};
    return j;
}

std::unique_ptr<Classifier> Classifier::from_json(const json& j) {
    if (j.value("format_version", 0) != 1) throw std::invalid_argument("unsupported model format version");
    const auto kind = parse_model_kind(j.value("kind", std::string{}));
    if (!kind) throw std::invalid_argument("unknown model kind");
    std::unique_ptr<Classifier> model;
    const json& p = j.at("params");
    switch (*kind) {
    case ModelKind::GaussianNB: model = GaussianNB::from_params(p); break;
    case ModelKind::LogisticRegression: model = LogisticRegression::from_params(p); break;
    case ModelKind::NeuralNet: model = NeuralNet::from_params(p); break;
    case ModelKind::Svm:
        if (p.value("kernel", std::string{}) == "rbf") model = KernelSvm::from_params(p);
        else model = LinearSvm::from_params(p);
        break;
    }
    std::vector<Leaning> classes;
    for (const auto& name : j.at("classes")) {
        auto l = parse_leaning(name.get<std::string>());
        if (!l) throw std::invalid_argument("unknown class in model file");
        classes.push_back(*l);
    }
    if (classes != model->classes_) throw std::invalid_argument("model classes disagree with parameters");
    if (j.at("input_dimension").get<Eigen::Index>() != model->dim_) {
        throw std::invalid_argument("model input dimension disagrees with parameters");
    }
    if (j.contains("status")) {
        model->status_.converged = j["status"].value("converged", true);
        model->status_.iterations = j["status"].value("iterations", 0LL);
        model->status_.message = j["status"].value("message", std::string{});
    }
    return model;
}

namespace {

std::vector<Leaning> classes_from_json(const json& p) {
    std::vector<Leaning> out;
    for (const auto& name : p.at("classes")) {
        auto l = parse_leaning(name.get<std::string>());
        if (!l) throw std::invalid_argument("unknown class");
        out.push_back(*l);
    }
    return out;
}

json classes_json(const std::vector<Leaning>& classes) {
    std::vector<std::string> names;
    for (Leaning l : classes) names.emplace_back(to_string(l));
    return names;
}

} // namespace

std::unique_ptr<Classifier> train_classifier(const Dataset& train, const TrainConfig& config) {
    config.validate();
    switch (config.kind) {
    case ModelKind::GaussianNB: return train_gnb(train);
    case ModelKind::LogisticRegression: return train_logreg(train, config);
    case ModelKind::Svm: return train_svm(train, config);
    case ModelKind::NeuralNet: return train_nn(train, config);
    }
    throw std::invalid_argument("unknown model kind");
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

GaussianNB::GaussianNB(std::vector<Leaning> classes, Eigen::VectorXd log_prior, DenseRows means,
                       DenseRows variances)
    : Classifier(std::move(classes), means.cols()),
      log_prior_(std::move(log_prior)),
      means_(std::move(means)),
      vars_(std::move(variances)) {
    const auto k = static_cast<Eigen::Index>(classes_.size());
    if (log_prior_.size() != k || means_.rows() != k || vars_.rows() != k || vars_.cols() != means_.cols()) {
        throw std::invalid_argument("naive Bayes parameter shapes disagree");
    }
    if ((vars_.array() <= 0.0).any()) throw std::invalid_argument("naive Bayes variances must be positive");
}

DenseRows GaussianNB::joint_log_likelihood(const SparseRows& x) const {
    // Zero entries share one per-class constant; explicit entries correct it.
    const auto k = static_cast<Eigen::Index>(classes_.size());
    Eigen::VectorXd base(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto var = vars_.row(c).array();
        const auto mu = means_.row(c).array();
        base[c] = log_prior_[c] - 0.5 * (2.0 * std::numbers::pi * var).log().sum() - 0.5 * (mu * mu / var).sum();
    }
    DenseRows jll(x.rows(), k);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            double acc = 0.0;
            for (SparseRows::InnerIterator it(x, r); it; ++it) {
                const double mu = means_(c, it.col());
                const double dev = it.value() - mu;
                acc += (dev * dev - mu * mu) / vars_(c, it.col());
            }
            jll(r, c) = base[c] - 0.5 * acc;
        }
    }
    return jll;
}

DenseRows GaussianNB::raw_scores(const SparseRows& x) const { return joint_log_likelihood(x); }

DenseRows GaussianNB::raw_proba(const SparseRows& x) const {
    DenseRows p = joint_log_likelihood(x);
    detail::softmax_rows(p);
    return p;
}

json GaussianNB::params_json() const {
    return {{"classes", classes_json(classes_)},
            {"log_prior", detail::vector_json(log_prior_)},
            {"means", detail::matrix_json(means_)},
            {"variances", detail::matrix_json(vars_)}};
}

std::unique_ptr<GaussianNB> GaussianNB::from_params(const json& p) {
    return std::make_unique<GaussianNB>(classes_from_json(p), detail::vector_from_json(p.at("log_prior")),
                                        detail::matrix_from_json(p.at("means")),
                                        detail::matrix_from_json(p.at("variances")));
}

std::unique_ptr<GaussianNB> train_gnb(const Dataset& train) {
    const auto classes = detail::training_classes(train);
    const auto y = detail::class_positions(train.labels, classes);
    const auto k = static_cast<Eigen::Index>(classes.size());
    const Eigen::Index d = train.features.cols();
    const SparseRows& x = train.features.values;

    Eigen::VectorXd n_k = Eigen::VectorXd::Zero(k);
    DenseRows sums = DenseRows::Zero(k, d);
    std::vector<std::vector<Eigen::Index>> nnz_count(static_cast<std::size_t>(k), std::vector<Eigen::Index>(static_cast<std::size_t>(d), 0));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        n_k[c] += 1.0;
        for (SparseRows::InnerIterator it(x, r); it; ++it) sums(c, it.col()) += it.value();
    }
    DenseRows means = sums.array().colwise() / n_k.array();

    // Two-pass variance: explicit entries plus the implicit zeros.
    DenseRows sq_dev = DenseRows::Zero(k, d);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        for (SparseRows::InnerIterator it(x, r); it; ++it) {
            const double dev = it.value() - means(c, it.col());
            sq_dev(c, it.col()) += dev * dev;
            ++nnz_count[static_cast<std::size_t>(c)][static_cast<std::size_t>(it.col())];
        }
    }
    DenseRows vars(k, d);
    for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double zeros = n_k[c] - static_cast<double>(nnz_count[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)]);
            vars(c, j) = (sq_dev(c, j) + zeros * means(c, j) * means(c, j)) / n_k[c];
        }
    }

    // Per-feature variance over the whole training set sets the floor.
    double max_var = 0.0;
    {
        const double n = static_cast<double>(x.rows());
        Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(d);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (SparseRows::InnerIterator it(x, r); it; ++it) col_sum[it.col()] += it.value();
        }
        const Eigen::VectorXd col_mean = col_sum / n;
        Eigen::VectorXd col_sq = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd col_nnz = Eigen::VectorXd::Zero(d);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (SparseRows::InnerIterator it(x, r); it; ++it) {
                const double dev = it.value() - col_mean[it.col()];
                col_sq[it.col()] += dev * dev;
                col_nnz[it.col()] += 1.0;
            }
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            const double v = (col_sq[j] + (n - col_nnz[j]) * col_mean[j] * col_mean[j]) / n;
            max_var = std::max(max_var, v);
        }
    }
    const double floor = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
    vars = vars.cwiseMax(floor);

    Eigen::VectorXd log_prior = (n_k / static_cast<double>(x.rows())).array().log();
    auto model = std::make_unique<GaussianNB>(classes, std::move(log_prior), std::move(means), std::move(vars));
    return model;
}

// ---------------------------------------------------------------------------
// Logistic regression (parameters; training in logreg.cpp)
// ---------------------------------------------------------------------------

LogisticRegression::LogisticRegression(std::vector<Leaning> classes, DenseRows weights, Eigen::VectorXd bias)
    : Classifier(std::move(classes), weights.cols()), w_(std::move(weights)), b_(std::move(bias)) {
    if (w_.rows() != static_cast<Eigen::Index>(classes_.size()) || b_.size() != w_.rows()) {
        throw std::invalid_argument("logistic regression parameter shapes disagree");
    }
}

DenseRows LogisticRegression::raw_scores(const SparseRows& x) const {
    DenseRows s = x * w_.transpose();
    s.rowwise() += b_.transpose();
    return s;
}

DenseRows LogisticRegression::raw_proba(const SparseRows& x) const {
    DenseRows p = raw_scores(x);
    detail::softmax_rows(p);
    return p;
}

json LogisticRegression::params_json() const {
    return {{"classes", classes_json(classes_)}, {"weights", detail::matrix_json(w_)}, {"bias", detail::vector_json(b_)}};
}

std::unique_ptr<LogisticRegression> LogisticRegression::from_params(const json& p) {
    return std::make_unique<LogisticRegression>(classes_from_json(p), detail::matrix_from_json(p.at("weights")),
                                                detail::vector_from_json(p.at("bias")));
}

// ---------------------------------------------------------------------------
// Linear and kernel SVM parameters
// ---------------------------------------------------------------------------

LinearSvm::LinearSvm(std::vector<Leaning> classes, DenseRows weights, Eigen::VectorXd bias)
    : Classifier(std::move(classes), weights.cols()), w_(std::move(weights)), b_(std::move(bias)) {
    if (w_.rows() != static_cast<Eigen::Index>(classes_.size()) || b_.size() != w_.rows()) {
        throw std::invalid_argument("linear SVM parameter shapes disagree");
    }
}

DenseRows LinearSvm::raw_scores(const SparseRows& x) const {
    DenseRows s = x * w_.transpose();
    s.rowwise() += b_.transpose();
    return s;
}

json LinearSvm::params_json() const {
    return {{"kernel", "linear"},
            {"classes", classes_json(classes_)},
            {"weights", detail::matrix_json(w_)},
            {"bias", detail::vector_json(b_)}};
}

std::unique_ptr<LinearSvm> LinearSvm::from_params(const json& p) {
    return std::make_unique<LinearSvm>(classes_from_json(p), detail::matrix_from_json(p.at("weights")),
                                       detail::vector_from_json(p.at("bias")));
}

KernelSvm::KernelSvm(std::vector<Leaning> classes, double gamma, SparseRows support, DenseRows coef,
                     Eigen::VectorXd rho)
    : Classifier(std::move(classes), support.cols()),
      gamma_(gamma),
      support_(std::move(support)),
      coef_(std::move(coef)),
      rho_(std::move(rho)) {
    if (coef_.rows() != static_cast<Eigen::Index>(classes_.size()) || coef_.cols() != support_.rows() ||
        rho_.size() != coef_.rows()) {
        throw std::invalid_argument("kernel SVM parameter shapes disagree");
    }
    sv_sqnorm_.resize(support_.rows());
    for (Eigen::Index r = 0; r < support_.rows(); ++r) sv_sqnorm_[r] = support_.row(r).squaredNorm();
}

DenseRows KernelSvm::raw_scores(const SparseRows& x) const {
    // ||a - b||^2 = |a|^2 + |b|^2 - 2 a.b
    const DenseRows cross = DenseRows(x * support_.transpose());
    DenseRows scores(x.rows(), coef_.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double xn = x.row(r).squaredNorm();
        Eigen::VectorXd k(support_.rows());
        for (Eigen::Index s = 0; s < support_.rows(); ++s) {
            const double dist = std::max(0.0, xn + sv_sqnorm_[s] - 2.0 * cross(r, s));
            k[s] = std::exp(-gamma_ * dist);
        }
        scores.row(r) = (coef_ * k - rho_).transpose();
    }
    return scores;
}

json KernelSvm::params_json() const {
    json rows = json::array();
    for (Eigen::Index r = 0; r < support_.rows(); ++r) {
        json entries = json::array();
        for (SparseRows::InnerIterator it(support_, r); it; ++it) entries.push_back({it.col(), it.value()});
        rows.push_back(std::move(entries));
    }
    return {{"kernel", "rbf"},
            {"classes", classes_json(classes_)},
            {"gamma", gamma_},
            {"dimension", support_.cols()},
            {"support", rows},
            {"coef", detail::matrix_json(coef_)},
            {"rho", detail::vector_json(rho_)}};
}

std::unique_ptr<KernelSvm> KernelSvm::from_params(const json& p) {
    const auto& rows = p.at("support");
    SparseRows support(static_cast<Eigen::Index>(rows.size()), p.at("dimension").get<Eigen::Index>());
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& e : rows[r]) trips.emplace_back(static_cast<Eigen::Index>(r), e[0].get<Eigen::Index>(), e[1].get<double>());
    }
    support.setFromTriplets(trips.begin(), trips.end());
    return std::make_unique<KernelSvm>(classes_from_json(p), p.at("gamma").get<double>(), std::move(support),
                                       detail::matrix_from_json(p.at("coef"), static_cast<Eigen::Index>(rows.size())),
                                       detail::vector_from_json(p.at("rho")));
}

// ---------------------------------------------------------------------------
// Neural net parameters
// ---------------------------------------------------------------------------

NeuralNet::NeuralNet(std::vector<Leaning> classes, Eigen::Index dim, MlpParams params)
    : Classifier(std::move(classes), dim), params_(std::move(params)) {
    if (params_.weights.empty() || params_.weights.size() != params_.biases.size() ||
        params_.weights.front().rows() != dim ||
        params_.weights.back().cols() != static_cast<Eigen::Index>(classes_.size())) {
        throw std::invalid_argument("neural net parameter shapes disagree");
    }
}

json NeuralNet::params_json() const {
    json layers = json::array();
    for (std::size_t i = 0; i < params_.weights.size(); ++i) {
        layers.push_back({{"weights", detail::matrix_json(params_.weights[i])},
                          {"bias", detail::vector_json(params_.biases[i].transpose())}});
    }
    return {{"classes", classes_json(classes_)}, {"input_dimension", dim_}, {"layers", layers}};
}

std::unique_ptr<NeuralNet> NeuralNet::from_params(const json& p) {
    MlpParams params;
    const auto dim = p.at("input_dimension").get<Eigen::Index>();
    Eigen::Index fan_in = dim;
    for (const auto& layer : p.at("layers")) {
        const auto& w = layer.at("weights");
        const auto fan_out = static_cast<Eigen::Index>(layer.at("bias").size());
        DenseRows m = detail::matrix_from_json(w, w.empty() ? fan_out : -1);
        if (m.rows() != fan_in) throw std::invalid_argument("layer shape mismatch");
        fan_in = m.cols();
        params.weights.push_back(std::move(m));
        params.biases.push_back(detail::vector_from_json(layer.at("bias")).transpose());
    }
    return std::make_unique<NeuralNet>(classes_from_json(p), dim, std::move(params));
}

} // namespace leanlab
