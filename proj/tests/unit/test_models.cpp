#include "leanlab/models.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace leanlab;

namespace {

Dataset make_dataset(const DenseRows& x, std::vector<Leaning> labels) {
    Dataset d;
    d.features.values = x.sparseView();
    d.features.values.makeCompressed();
    for (Eigen::Index i = 0; i < x.rows(); ++i) d.features.row_ids.push_back("r" + std::to_string(i));
    d.labels = std::move(labels);
    return d;
}

std::vector<Leaning> cycle_labels(std::size_t n, std::size_t classes = 3) {
    std::vector<Leaning> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(leaning_from_index(i % classes));
    return out;
}

// Three well separated Gaussian blobs in 4 dimensions.
Dataset blobs(std::size_t n, std::uint64_t seed, double spread = 0.3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    DenseRows x(static_cast<Eigen::Index>(n), 4);
    auto labels = cycle_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = class_index(labels[i]);
        for (Eigen::Index j = 0; j < 4; ++j) {
            x(static_cast<Eigen::Index>(i), j) = (static_cast<std::size_t>(j) == k ? 3.0 : 0.0) + noise(rng);
        }
    }
    return make_dataset(x, labels);
}

double accuracy(const Classifier& m, const Dataset& d) {
    const auto pred = m.predict(d.features.values);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == d.labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b)); }

Dataset xor_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseRows x(static_cast<Eigen::Index>(n), 2);
    std::vector<Leaning> labels;
    for (std::size_t i = 0; i < n; ++i) {
        double a = u(rng);
        double b = u(rng);
        while (std::abs(a) < 0.1) a = u(rng);
        while (std::abs(b) < 0.1) b = u(rng);
        x(static_cast<Eigen::Index>(i), 0) = a;
        x(static_cast<Eigen::Index>(i), 1) = b;
        labels.push_back(a * b > 0 ? Leaning::Left : Leaning::Right);
    }
    return make_dataset(x, labels);
}

} // namespace

TEST_CASE("stratified split sizes and disjointness") {
    std::vector<Leaning> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(Leaning::Left);
    for (int i = 0; i < 30; ++i) labels.push_back(Leaning::Center);
    for (int i = 0; i < 20; ++i) labels.push_back(Leaning::Right);
    const auto s = split_indices(labels, 0.8, 7);
    CHECK(s.train.size() == 80);
    CHECK(s.test.size() == 20);
    std::array<int, 3> per{};
    for (auto i : s.train) ++per[class_index(labels[i])];
    CHECK(per == std::array<int, 3>{40, 24, 16});
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 100);

    const auto again = split_indices(labels, 0.8, 7);
    CHECK(again.train == s.train);
    CHECK(split_indices(labels, 0.8, 8).train != s.train);
    CHECK_THROWS_AS(split_indices(labels, 1.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(split_indices(std::vector<Leaning>{Leaning::Left, Leaning::Left, Leaning::Right}, 0.5, 1),
                    std::invalid_argument);
}

TEST_CASE("split sizes hold for random class mixes") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Leaning> labels;
        const std::size_t n = 6 + rng() % 200;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(leaning_from_index(rng() % 3));
        bool ok = true;
        for (std::size_t k = 0; k < 3; ++k) {
            const auto c = std::count(labels.begin(), labels.end(), leaning_from_index(k));
            if (c == 1) ok = false;
        }
        if (!ok) continue;
        const double ratio = 0.2 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
        const auto s = split_indices(labels, ratio, rng());
        CHECK(s.train.size() + s.test.size() == n);
        const auto expected = static_cast<long>(std::llround(ratio * static_cast<double>(n)));
        CHECK(std::abs(static_cast<long>(s.train.size()) - expected) <= 3);
        for (std::size_t k = 0; k < 3; ++k) {
            const auto total = std::count(labels.begin(), labels.end(), leaning_from_index(k));
            if (total == 0) continue;
            const auto in_train = std::count_if(s.train.begin(), s.train.end(),
                                                [&](auto i) { return labels[i] == leaning_from_index(k); });
            CHECK(in_train >= 1);
            CHECK(in_train < total);
        }
    }
}

TEST_CASE("few-shot sampling") {
    std::vector<Leaning> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(leaning_from_index(static_cast<std::size_t>(i % 3)));
    const auto idx = few_shot_indices(labels, 4, 3);
    CHECK(idx.size() == 12);
    std::array<int, 3> per{};
    for (auto i : idx) ++per[class_index(labels[i])];
    CHECK(per == std::array<int, 3>{4, 4, 4});
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 12);
    CHECK(few_shot_indices(labels, 4, 3) == idx);
    CHECK_THROWS_AS(few_shot_indices(labels, 11, 3), std::invalid_argument);

    std::vector<Leaning> two(labels.begin(), labels.end());
    std::erase(two, Leaning::Center);
    CHECK(few_shot_indices(two, 5, 1).size() == 10);
}

TEST_CASE("Gaussian naive Bayes matches a direct computation") {
    DenseRows x(10, 2);
    x << 1.0, 0.0, 2.0, 1.0, 1.5, 0.0, 0.0, 3.0, 0.5, 2.5, 0.0, 4.0, 3.0, 3.0, 4.0, 2.0, 3.5, 3.5, 4.5, 0.0;
    std::vector<Leaning> y = {Leaning::Left,   Leaning::Left,   Leaning::Left,  Leaning::Center, Leaning::Center,
                              Leaning::Center, Leaning::Right,  Leaning::Right, Leaning::Right,  Leaning::Right};
    const auto model = train_gnb(make_dataset(x, y));

    double max_var = 0.0;
    for (Eigen::Index j = 0; j < 2; ++j) {
        const double m = x.col(j).mean();
        max_var = std::max(max_var, (x.col(j).array() - m).square().mean());
    }
    const double floor = 1e-9 * max_var;
    std::vector<std::vector<Eigen::Index>> rows = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8, 9}};
    const Eigen::RowVector2d probe(2.0, 1.0);
    std::vector<double> jll;
    for (std::size_t c = 0; c < 3; ++c) {
        double score = std::log(static_cast<double>(rows[c].size()) / 10.0);
        for (Eigen::Index j = 0; j < 2; ++j) {
            double mean = 0.0;
            for (auto r : rows[c]) mean += x(r, j);
            mean /= static_cast<double>(rows[c].size());
            double var = 0.0;
            for (auto r : rows[c]) var += (x(r, j) - mean) * (x(r, j) - mean);
            var = std::max(var / static_cast<double>(rows[c].size()), floor);
            CHECK(model->means()(static_cast<Eigen::Index>(c), j) == doctest::Approx(mean).epsilon(1e-12));
            CHECK(model->variances()(static_cast<Eigen::Index>(c), j) == doctest::Approx(var).epsilon(1e-12));
            score += -0.5 * std::log(2 * std::numbers::pi * var) - (probe[j] - mean) * (probe[j] - mean) / (2 * var);
        }
        jll.push_back(score);
    }
    SparseRows xp = DenseRows(probe).sparseView();
    const auto got = model->joint_log_likelihood(xp);
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(std::abs(got(0, c) - jll[static_cast<std::size_t>(c)]) < 1e-9);
    const auto proba = model->predict_proba(xp);
    CHECK(proba.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("naive Bayes with constant features keeps a positive variance") {
    DenseRows x = DenseRows::Zero(4, 3);
    const auto model = train_gnb(make_dataset(x, {Leaning::Left, Leaning::Left, Leaning::Right, Leaning::Right}));
    CHECK((model->variances().array() > 0.0).all());
    CHECK(model->predict_proba(x.sparseView()).allFinite());
}

TEST_CASE("logistic regression gradient matches finite differences") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        const int d = 4;
        const int k = 3;
        DenseRows xd(n, d);
        DenseRows w(k, d);
        Eigen::VectorXd b(k);
        for (Eigen::Index i = 0; i < xd.size(); ++i) xd.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = normal(rng);
        std::vector<int> y;
        for (int i = 0; i < n; ++i) y.push_back(static_cast<int>(rng() % k));
        const SparseRows x = xd.sparseView();
        const double C = 0.5 + trial * 0.1;
        DenseRows gw;
        Eigen::VectorXd gb;
        logreg_objective(w, b, x, y, C, &gw, &gb);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            DenseRows wp = w;
            DenseRows wm = w;
            wp.data()[i] += h;
            wm.data()[i] -= h;
            const double fd = (logreg_objective(wp, b, x, y, C) - logreg_objective(wm, b, x, y, C)) / (2 * h);
            CHECK(rel_err(fd, gw.data()[i]) < 1e-4);
        }
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            Eigen::VectorXd bp = b;
            Eigen::VectorXd bm = b;
            bp[i] += h;
            bm[i] -= h;
            const double fd = (logreg_objective(w, bp, x, y, C) - logreg_objective(w, bm, x, y, C)) / (2 * h);
            CHECK(rel_err(fd, gb[i]) < 1e-4);
        }
    }
}

TEST_CASE("logistic regression objective at zero") {
    DenseRows xd(2, 1);
    xd << 1.0, -1.0;
    const SparseRows x = xd.sparseView();
    std::vector<int> y = {0, 1};
    const double f = logreg_objective(DenseRows::Zero(2, 1), Eigen::VectorXd::Zero(2), x, y, 1.0);
    CHECK(f == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("logistic regression separates blobs and converges") {
    const auto data = blobs(300, 5);
    auto [train, test] = split_train_test(data, 0.8, 1);
    TrainConfig cfg;
    const auto model = train_logreg(train, cfg);
    CHECK(model->status().converged);
    CHECK(accuracy(*model, test) >= 0.97);
    const auto p = model->predict_proba(test.features.values);
    for (Eigen::Index r = 0; r < p.rows(); ++r) CHECK(p.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));

    DenseRows gw;
    Eigen::VectorXd gb;
    const auto y = [&] {
        std::vector<int> out;
        for (auto l : train.labels) out.push_back(static_cast<int>(class_index(l)));
        return out;
    }();
    logreg_objective(model->weights(), model->bias(), train.features.values, y, cfg.C, &gw, &gb);
    CHECK(std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff()) < cfg.tolerance);
}

TEST_CASE("logistic regression without features predicts the majority") {
    DenseRows x = DenseRows::Zero(10, 3);
    std::vector<Leaning> y(6, Leaning::Right);
    y.insert(y.end(), 4, Leaning::Left);
    const auto model = train_logreg(make_dataset(x, y), TrainConfig{});
    for (auto l : model->predict(x.sparseView())) CHECK(l == Leaning::Right);
    const auto p = model->predict_proba(x.sparseView());
    CHECK(p(0, 1) == doctest::Approx(0.6).epsilon(1e-4));
}

TEST_CASE("strong regularization shrinks weights") {
    const auto data = blobs(90, 2);
    TrainConfig cfg;
    cfg.C = 1e-6;
    const auto small = train_logreg(data, cfg);
    cfg.C = 1.0;
    const auto large = train_logreg(data, cfg);
    CHECK(small->weights().norm() < 1e-3);
    CHECK(small->weights().norm() < large->weights().norm());
}

TEST_CASE("linear SVM separates blobs") {
    const auto data = blobs(300, 8);
    auto [train, test] = split_train_test(data, 0.8, 1);
    TrainConfig cfg;
    cfg.kind = ModelKind::Svm;
    const auto model = train_classifier(train, cfg);
    CHECK(accuracy(*model, test) >= 0.97);
    CHECK_FALSE(model->has_probabilities());
    CHECK_THROWS_AS(model->predict_proba(test.features.values), std::logic_error);
}

TEST_CASE("RBF SVM solves XOR where the linear one cannot") {
    const auto data = xor_data(500, 3);
    auto [train, test] = split_train_test(data, 0.8, 2);
    TrainConfig cfg;
    cfg.kind = ModelKind::Svm;
    cfg.kernel = SvmKernel::Rbf;
    cfg.C = 10.0;
    const auto rbf = train_classifier(train, cfg);
    CHECK(rbf->status().converged);
    CHECK(accuracy(*rbf, test) >= 0.95);
    cfg.kernel = SvmKernel::Linear;
    const auto lin = train_classifier(train, cfg);
    CHECK(accuracy(*lin, test) <= 0.75);
}

TEST_CASE("RBF SVM refuses oversized training sets") {
    DenseRows x = DenseRows::Zero(static_cast<Eigen::Index>(kMaxKernelRows) + 1, 1);
    TrainConfig cfg;
    cfg.kind = ModelKind::Svm;
    cfg.kernel = SvmKernel::Rbf;
    CHECK_THROWS_AS(train_classifier(make_dataset(x, cycle_labels(kMaxKernelRows + 1, 2)), cfg),
                    std::invalid_argument);
}

TEST_CASE("network gradient matches finite differences") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<int> widths = {4, 5, 4, 3, 3};
        auto params = init_mlp(widths, 100 + static_cast<std::uint64_t>(trial));
        for (auto& b : params.biases) {
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * normal(rng);
        }
        DenseRows xd(5, 4);
        for (Eigen::Index i = 0; i < xd.size(); ++i) xd.data()[i] = normal(rng);
        const SparseRows x = xd.sparseView();
        std::vector<int> y;
        for (int i = 0; i < 5; ++i) y.push_back(static_cast<int>(rng() % 3));
        MlpParams grad;
        mlp_loss_grad(params, x, y, &grad);
        auto check_entry = [&](double& slot, double analytic) {
            const double saved = slot;
            slot = saved + h;
            const double up = mlp_loss_grad(params, x, y);
            slot = saved - h;
            const double down = mlp_loss_grad(params, x, y);
            slot = saved;
            const double fd = (up - down) / (2 * h);
            // ReLU kinks make a few entries non-differentiable; skip those.
            if (std::abs(fd) < 1e-7 && std::abs(analytic) < 1e-7) return;
            CHECK(rel_err(fd, analytic) < 1e-4);
        };
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            for (Eigen::Index i = 0; i < params.weights[l].size(); ++i) {
                check_entry(params.weights[l].data()[i], grad.weights[l].data()[i]);
            }
            for (Eigen::Index i = 0; i < params.biases[l].size(); ++i) {
                check_entry(params.biases[l].data()[i], grad.biases[l].data()[i]);
            }
        }
    }
}

TEST_CASE("network learns blobs and a zero step leaves it unchanged") {
    const auto data = blobs(300, 9);
    auto [train, test] = split_train_test(data, 0.8, 1);
    TrainConfig cfg;
    cfg.kind = ModelKind::NeuralNet;
    cfg.hidden = {16, 16, 8};
    cfg.learning_rate = 1e-3;
    cfg.epochs = 30;
    const auto model = train_nn(train, cfg);
    CHECK(accuracy(*model, test) >= 0.95);

    cfg.learning_rate = 0.0;
    cfg.epochs = 2;
    const auto frozen = train_nn(train, cfg);
    const std::vector<int> widths = {4, 16, 16, 8, 3};
    const auto init = init_mlp(widths, cfg.seed);
    for (std::size_t l = 0; l < init.weights.size(); ++l) {
        CHECK(frozen->params().weights[l] == init.weights[l]);
        CHECK(frozen->params().biases[l] == init.biases[l]);
    }
}

TEST_CASE("training is deterministic") {
    const auto data = blobs(120, 4);
    for (auto kind : {ModelKind::GaussianNB, ModelKind::LogisticRegression, ModelKind::Svm, ModelKind::NeuralNet}) {
        TrainConfig cfg;
        cfg.kind = kind;
        cfg.hidden = {8, 8, 8};
        cfg.learning_rate = 1e-3;
        CHECK(train_classifier(data, cfg)->to_json() == train_classifier(data, cfg)->to_json());
    }
}

TEST_CASE("classifiers round-trip through JSON") {
    const auto data = blobs(90, 6);
    std::vector<TrainConfig> configs(5);
    configs[0].kind = ModelKind::GaussianNB;
    configs[1].kind = ModelKind::LogisticRegression;
    configs[2].kind = ModelKind::Svm;
    configs[3].kind = ModelKind::Svm;
    configs[3].kernel = SvmKernel::Rbf;
    configs[4].kind = ModelKind::NeuralNet;
    configs[4].hidden = {6, 5, 4};
    for (const auto& cfg : configs) {
        const auto model = train_classifier(data, cfg);
        const auto back = Classifier::from_json(nlohmann::json::parse(model->to_json().dump()));
        CHECK(back->kind() == model->kind());
        CHECK(back->classes() == model->classes());
        const DenseRows a = model->decision_scores(data.features.values);
        const DenseRows b = back->decision_scores(data.features.values);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(back->to_json() == model->to_json());
    }
}

TEST_CASE("input validation") {
    const auto data = blobs(30, 1);
    const auto model = train_logreg(data, TrainConfig{});
    SparseRows wrong(2, 5);
    CHECK_THROWS_AS(model->predict(wrong), std::invalid_argument);

    DenseRows x = DenseRows::Ones(4, 2);
    CHECK_THROWS_AS(train_logreg(make_dataset(x, std::vector<Leaning>(4, Leaning::Left)), TrainConfig{}),
                    std::invalid_argument);
    TrainConfig bad;
    bad.C = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(parse_model_kind("lr") == ModelKind::LogisticRegression);
    CHECK(parse_model_kind("mlp") == ModelKind::NeuralNet);
    CHECK_FALSE(parse_model_kind("forest").has_value());

    TrainConfig cfg;
    cfg.kind = ModelKind::Svm;
    cfg.kernel = SvmKernel::Rbf;
    cfg.epochs = 7;
    const auto back = train_config_from_json(to_json(cfg));
    CHECK(back.kind == cfg.kind);
    CHECK(back.kernel == cfg.kernel);
    CHECK(back.effective_epochs() == 7);
}
