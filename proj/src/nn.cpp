#include "leanlab/error.hpp"
#include "leanlab/models.hpp"

#include "model_support.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace leanlab {

MlpParams MlpParams::zeros_like(const MlpParams& p) {
    MlpParams out;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        out.weights.push_back(DenseRows::Zero(p.weights[l].rows(), p.weights[l].cols()));
        out.biases.push_back(Eigen::RowVectorXd::Zero(p.biases[l].size()));
    }
    return out;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    }
    return n;
}

MlpParams init_mlp(std::span<const int> widths, std::uint64_t seed) {
    if (widths.size() < 2) throw std::invalid_argument("a network needs at least input and output widths");
    std::mt19937_64 rng(seed);
    MlpParams p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / std::max(1, fan_in)));
        DenseRows w(fan_in, fan_out);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::RowVectorXd::Zero(fan_out));
    }
    return p;
}

namespace {

/// Pre-activations of every layer; the last entry holds the logits.
std::vector<DenseRows> forward(const MlpParams& p, const SparseRows& x) {
    std::vector<DenseRows> z;
    z.reserve(p.weights.size());
    DenseRows h;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        DenseRows zl = l == 0 ? DenseRows(x * p.weights[0]) : DenseRows(h * p.weights[l]);
        zl.rowwise() += p.biases[l];
        if (l + 1 < p.weights.size()) h = zl.cwiseMax(0.0);
        z.push_back(std::move(zl));
    }
    return z;
}

SparseRows gather_rows(const SparseRows& x, std::span<const std::size_t> rows) {
    SparseRows out(static_cast<Eigen::Index>(rows.size()), x.cols());
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (SparseRows::InnerIterator it(x, static_cast<Eigen::Index>(rows[r])); it; ++it) {
            trips.emplace_back(static_cast<Eigen::Index>(r), it.col(), it.value());
        }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace

double mlp_loss_grad(const MlpParams& params, const SparseRows& x, std::span<const int> y, MlpParams* grad) {
    const auto z = forward(params, x);
    DenseRows delta = z.back();
    const double n = static_cast<double>(x.rows());
    double loss = 0.0;
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
        const double mx = delta.row(r).maxCoeff();
        const double lse = mx + std::log((delta.row(r).array() - mx).exp().sum());
        loss += lse - delta(r, y[static_cast<std::size_t>(r)]);
        delta.row(r) = (delta.row(r).array() - lse).exp();
        delta(r, y[static_cast<std::size_t>(r)]) -= 1.0;
    }
    loss /= n;
    if (grad == nullptr) return loss;

    delta /= n;
    *grad = MlpParams::zeros_like(params);
    for (std::size_t l = params.weights.size(); l-- > 0;) {
        grad->biases[l] = delta.colwise().sum();
        if (l == 0) {
            grad->weights[0] = DenseRows(x.transpose() * delta);
        } else {
            const DenseRows h = z[l - 1].cwiseMax(0.0);
            grad->weights[l] = h.transpose() * delta;
            DenseRows back = delta * params.weights[l].transpose();
            delta = back.array() * (z[l - 1].array() > 0.0).cast<double>();
        }
    }
    return loss;
}

DenseRows NeuralNet::raw_scores(const SparseRows& x) const { return forward(params_, x).back(); }

DenseRows NeuralNet::raw_proba(const SparseRows& x) const {
    DenseRows p = raw_scores(x);
    detail::softmax_rows(p);
    return p;
}

std::unique_ptr<NeuralNet> train_nn(const Dataset& train, const TrainConfig& config) {
    config.validate();
    const auto classes = detail::training_classes(train);
    const auto y = detail::class_positions(train.labels, classes);
    const SparseRows& x = train.features.values;
    const auto n = static_cast<std::size_t>(x.rows());

    std::vector<int> widths{static_cast<int>(x.cols())};
    widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
    widths.push_back(static_cast<int>(classes.size()));
    MlpParams params = init_mlp(widths, config.seed);
    MlpParams m = MlpParams::zeros_like(params);
    MlpParams v = MlpParams::zeros_like(params);
    MlpParams grad;

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    const double lr = config.learning_rate;
    const auto batch = static_cast<std::size_t>(config.batch_size);
    const int epochs = config.effective_epochs();

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    long long step = 0;

    auto adam = [&](auto& param, const auto& g, auto& m1, auto& m2, double c1, double c2) {
        m1 = kBeta1 * m1 + (1.0 - kBeta1) * g;
        m2 = kBeta2 * m2 + (1.0 - kBeta2) * g.cwiseProduct(g);
        param.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kEps);
    };

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const SparseRows xb = gather_rows(x, rows);
            std::vector<int> yb;
            yb.reserve(rows.size());
            for (std::size_t r : rows) yb.push_back(y[r]);
            const double loss = mlp_loss_grad(params, xb, yb, &grad);
            if (!std::isfinite(loss)) {
                throw TrainingError("neural net loss became non-finite in epoch " + std::to_string(epoch));
            }
            ++step;
            const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                adam(params.weights[l], grad.weights[l], m.weights[l], v.weights[l], c1, c2);
                adam(params.biases[l], grad.biases[l], m.biases[l], v.biases[l], c1, c2);
            }
        }
    }
    auto model = std::make_unique<NeuralNet>(classes, x.cols(), std::move(params));
    model->set_status({true, step, {}});
    return model;
}

} // namespace leanlab
