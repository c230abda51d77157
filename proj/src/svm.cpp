#include "leanlab/error.hpp"
#include "leanlab/models.hpp"

#include "model_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

namespace leanlab {

namespace {

// ---------------------------------------------------------------------------
// Linear: Pegasos on [x, 1]
// ---------------------------------------------------------------------------

std::unique_ptr<LinearSvm> train_linear(const Dataset& train, const std::vector<Leaning>& classes,
                                        const std::vector<int>& y, const TrainConfig& config) {
    const SparseRows& x = train.features.values;
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const auto k = static_cast<Eigen::Index>(classes.size());
    const double lambda = 1.0 / (config.C * static_cast<double>(n));
    const double radius_sq = 1.0 / lambda;
    const int epochs = config.effective_epochs();

    std::vector<double> row_sqnorm(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) row_sqnorm[static_cast<std::size_t>(r)] = x.row(r).squaredNorm() + 1.0;

    DenseRows weights(k, d);
    Eigen::VectorXd bias(k);
    std::vector<std::size_t> order(static_cast<std::size_t>(n));

    for (Eigen::Index c = 0; c < k; ++c) {
        // w = scale * v, with v's last entry holding the bias term.
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
        double scale = 1.0;
        double v_sqnorm = 0.0;
        std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(c));
        std::iota(order.begin(), order.end(), std::size_t{0});
        long long t = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t i : order) {
                ++t;
                const auto r = static_cast<Eigen::Index>(i);
                const double yi = y[i] == c ? 1.0 : -1.0;
                double dot = v[d];
                for (SparseRows::InnerIterator it(x, r); it; ++it) dot += v[it.col()] * it.value();
                const double margin = yi * scale * dot;
                const double eta = 1.0 / (lambda * static_cast<double>(t));
                scale *= 1.0 - 1.0 / static_cast<double>(t);
                if (scale <= 0.0) {
                    v.setZero();
                    v_sqnorm = 0.0;
                    scale = 1.0;
                    dot = 0.0;
                }
                if (margin < 1.0) {
                    const double a = eta * yi / scale;
                    for (SparseRows::InnerIterator it(x, r); it; ++it) v[it.col()] += a * it.value();
                    v[d] += a;
                    v_sqnorm += 2.0 * a * dot + a * a * row_sqnorm[i];
                }
                const double w_sqnorm = scale * scale * v_sqnorm;
                if (w_sqnorm > radius_sq) scale *= std::sqrt(radius_sq / w_sqnorm);
                if (scale < 1e-9) {
                    v *= scale;
                    v_sqnorm = v.squaredNorm();
                    scale = 1.0;
                }
            }
        }
        v *= scale;
        weights.row(c) = v.head(d).transpose();
        bias[c] = v[d];
    }
    if (!weights.allFinite() || !bias.allFinite()) throw TrainingError("linear SVM weights became non-finite");
    return std::make_unique<LinearSvm>(classes, std::move(weights), std::move(bias));
}

// ---------------------------------------------------------------------------
// RBF: SMO with second-order working set selection
// ---------------------------------------------------------------------------

class KernelRows {
public:
    KernelRows(const SparseRows& x, double gamma) : x_(x), gamma_(gamma), sqnorm_(x.rows()) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) sqnorm_[r] = x.row(r).squaredNorm();
        const std::size_t budget_bytes = std::size_t{256} << 20;
        capacity_ = std::max<std::size_t>(2, budget_bytes / (sizeof(double) * static_cast<std::size_t>(std::max<Eigen::Index>(1, x.rows()))));
    }

    const Eigen::VectorXd& row(Eigen::Index i) {
        if (auto it = cache_.find(i); it != cache_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        if (cache_.size() >= capacity_) {
            cache_.erase(lru_.back());
            lru_.pop_back();
        }
        const Eigen::VectorXd xi = Eigen::VectorXd(x_.row(i).transpose());
        Eigen::VectorXd dots = x_ * xi;
        for (Eigen::Index t = 0; t < dots.size(); ++t) {
            dots[t] = std::exp(-gamma_ * std::max(0.0, sqnorm_[i] + sqnorm_[t] - 2.0 * dots[t]));
        }
        lru_.push_front(i);
        auto [pos, ok] = cache_.emplace(i, std::make_pair(std::move(dots), lru_.begin()));
        return pos->second.first;
    }

private:
    const SparseRows& x_;
    double gamma_;
    Eigen::VectorXd sqnorm_;
    std::size_t capacity_;
    std::list<Eigen::Index> lru_;
    std::unordered_map<Eigen::Index, std::pair<Eigen::VectorXd, std::list<Eigen::Index>::iterator>> cache_;
};

struct BinaryDual {
    Eigen::VectorXd alpha;
    double rho = 0.0;
    long long iterations = 0;
    bool converged = true;
};

BinaryDual solve_binary(KernelRows& kernel, const std::vector<double>& y, double C, long long max_iter) {
    constexpr double kTau = 1e-12;
    constexpr double kEps = 1e-3;
    const auto n = static_cast<Eigen::Index>(y.size());
    BinaryDual out;
    out.alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd& alpha = out.alpha;
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
    auto upper = [&](Eigen::Index t) { return alpha[t] >= C; };
    auto lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };

    while (true) {
        if (out.iterations >= max_iter) {
            out.converged = false;
            break;
        }
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
            } else if (!lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        if (i < 0) break;
        const Eigen::VectorXd& ki = kernel.row(i);
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (lower(t)) continue;
                const double diff = gmax + grad[t];
                gmax2 = std::max(gmax2, grad[t]);
                if (diff > 0.0) {
                    double quad = 2.0 - 2.0 * ki[t];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best) { best = obj; j = t; }
                }
            } else {
                if (upper(t)) continue;
                const double diff = gmax - grad[t];
                gmax2 = std::max(gmax2, -grad[t]);
                if (diff > 0.0) {
                    double quad = 2.0 - 2.0 * ki[t];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best) { best = obj; j = t; }
                }
            }
        }
        if (gmax + gmax2 < kEps || j < 0) break;
        ++out.iterations;

        const Eigen::VectorXd ki_copy = ki;
        const Eigen::VectorXd& kj = kernel.row(j);
        const double qij = y[i] * y[j] * ki_copy[j];
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = 2.0 + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (Eigen::Index t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * ki_copy[t] * di + y[j] * kj[t] * dj);
        }
    }

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    out.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
    return out;
}

double feature_variance(const SparseRows& x) {
    const double count = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
    if (count == 0.0) return 0.0;
    double sum = 0.0;
    double sq = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (SparseRows::InnerIterator it(x, r); it; ++it) {
            sum += it.value();
            sq += it.value() * it.value();
        }
    }
    const double mean = sum / count;
    return std::max(0.0, sq / count - mean * mean);
}

std::unique_ptr<KernelSvm> train_rbf(const Dataset& train, const std::vector<Leaning>& classes,
                                     const std::vector<int>& y, const TrainConfig& config) {
    const SparseRows& x = train.features.values;
    if (static_cast<std::size_t>(x.rows()) > kMaxKernelRows) {
        throw std::invalid_argument("RBF SVM is limited to " + std::to_string(kMaxKernelRows) + " training rows; got " +
                                    std::to_string(x.rows()));
    }
    const double var = feature_variance(x);
    const double gamma = var > 0.0 && x.cols() > 0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
    KernelRows kernel(x, gamma);
    const auto k = static_cast<Eigen::Index>(classes.size());
    const Eigen::Index n = x.rows();

    std::vector<BinaryDual> duals;
    TrainStatus status{true, 0, {}};
    for (Eigen::Index c = 0; c < k; ++c) {
        std::vector<double> yc(static_cast<std::size_t>(n));
        for (Eigen::Index r = 0; r < n; ++r) yc[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)] == c ? 1.0 : -1.0;
        duals.push_back(solve_binary(kernel, yc, config.C, config.max_dual_iterations));
        status.iterations += duals.back().iterations;
        if (!duals.back().converged) {
            status.converged = false;
            status.message = "dual solver stopped at the iteration cap for class '" +
                             std::string(to_string(classes[static_cast<std::size_t>(c)])) + "'";
        }
    }

    std::vector<Eigen::Index> support;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (const auto& dual : duals) {
            if (dual.alpha[r] > 0.0) {
                support.push_back(r);
                break;
            }
        }
    }
    std::vector<std::size_t> rows(support.begin(), support.end());
    SparseRows sv = train.features.select_rows(rows).values;
    DenseRows coef(k, static_cast<Eigen::Index>(support.size()));
    Eigen::VectorXd rho(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        for (std::size_t s = 0; s < support.size(); ++s) {
            const Eigen::Index r = support[s];
            const double yc = y[static_cast<std::size_t>(r)] == c ? 1.0 : -1.0;
            coef(c, static_cast<Eigen::Index>(s)) = duals[static_cast<std::size_t>(c)].alpha[r] * yc;
        }
        rho[c] = duals[static_cast<std::size_t>(c)].rho;
    }
    auto model = std::make_unique<KernelSvm>(classes, gamma, std::move(sv), std::move(coef), std::move(rho));
    model->set_status(std::move(status));
    return model;
}

} // namespace

std::unique_ptr<Classifier> train_svm(const Dataset& train, const TrainConfig& config) {
    config.validate();
    const auto classes = detail::training_classes(train);
    const auto y = detail::class_positions(train.labels, classes);
    if (config.kernel == SvmKernel::Rbf) return train_rbf(train, classes, y, config);
    return train_linear(train, classes, y, config);
}

} // namespace leanlab
