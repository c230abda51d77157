#include "leanlab/error.hpp"
#include "leanlab/models.hpp"

#include "model_support.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace leanlab {

double logreg_objective(const DenseRows& weights, const Eigen::VectorXd& bias, const SparseRows& x,
                        std::span<const int> y, double C, DenseRows* grad_w, Eigen::VectorXd* grad_b) {
    DenseRows scores = x * weights.transpose();
    scores.rowwise() += bias.transpose();
    double loss = 0.0;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const double mx = scores.row(r).maxCoeff();
        const double lse = mx + std::log((scores.row(r).array() - mx).exp().sum());
        loss += lse - scores(r, y[static_cast<std::size_t>(r)]);
        if (grad_w != nullptr || grad_b != nullptr) {
            scores.row(r) = (scores.row(r).array() - lse).exp();
            scores(r, y[static_cast<std::size_t>(r)]) -= 1.0;
        }
    }
    loss += weights.squaredNorm() / (2.0 * C);
    if (grad_w != nullptr) {
        *grad_w = DenseRows(scores.transpose() * x) + weights / C;
    }
    if (grad_b != nullptr) {
        *grad_b = scores.colwise().sum().transpose();
    }
    return loss;
}

namespace {

struct Point {
    DenseRows w;
    Eigen::VectorXd b;
};

double max_abs(const DenseRows& gw, const Eigen::VectorXd& gb) {
    double m = gw.size() > 0 ? gw.cwiseAbs().maxCoeff() : 0.0;
    if (gb.size() > 0) m = std::max(m, gb.cwiseAbs().maxCoeff());
    return m;
}

} // namespace

std::unique_ptr<LogisticRegression> train_logreg(const Dataset& train, const TrainConfig& config) {
    config.validate();
    const auto classes = detail::training_classes(train);
    const auto y = detail::class_positions(train.labels, classes);
    const SparseRows& x = train.features.values;
    const auto k = static_cast<Eigen::Index>(classes.size());
    const Eigen::Index d = x.cols();
    const int max_iter = config.effective_epochs();

    // Accelerated gradient descent with backtracking and function-value restart.
    Point current{DenseRows::Zero(k, d), Eigen::VectorXd::Zero(k)};
    Point previous = current;
    double f_current = logreg_objective(current.w, current.b, x, y, config.C);
    double theta = 1.0;
    double step = 1.0;
    DenseRows gw;
    Eigen::VectorXd gb;
    TrainStatus status{false, 0, {}};
    Point result = current;

    for (int iter = 1; iter <= max_iter; ++iter) {
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        const double beta = (theta - 1.0) / theta_next;
        Point probe{current.w + beta * (current.w - previous.w), current.b + beta * (current.b - previous.b)};
        const double f_probe = logreg_objective(probe.w, probe.b, x, y, config.C, &gw, &gb);
        if (!std::isfinite(f_probe)) {
            throw TrainingError("logistic regression loss became non-finite at iteration " + std::to_string(iter));
        }
        status.iterations = iter;
        if (max_abs(gw, gb) < config.tolerance) {
            result = std::move(probe);
            status.converged = true;
            break;
        }
        const double g_sq = gw.squaredNorm() + gb.squaredNorm();
        Point next;
        double f_next = 0.0;
        for (int tries = 0;; ++tries) {
            next.w = probe.w - step * gw;
            next.b = probe.b - step * gb;
            f_next = logreg_objective(next.w, next.b, x, y, config.C);
            if (std::isfinite(f_next) && f_next <= f_probe - 0.5 * step * g_sq) break;
            step *= 0.5;
            if (tries > 200) {
                throw TrainingError("logistic regression line search failed at iteration " + std::to_string(iter));
            }
        }
        if (f_next > f_current) {
            theta = 1.0;
            previous = current;
        } else {
            theta = theta_next;
            previous = std::move(current);
            current = std::move(next);
            f_current = f_next;
        }
        step *= 1.1;
        result = current;
    }
    if (!status.converged) {
        status.message = "gradient tolerance not reached within " + std::to_string(max_iter) + " iterations";
    }
    auto model = std::make_unique<LogisticRegression>(classes, std::move(result.w), std::move(result.b));
    model->set_status(std::move(status));
    return model;
}

} // namespace leanlab
