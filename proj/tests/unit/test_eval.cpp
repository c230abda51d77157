#include "leanlab/error.hpp"
#include "leanlab/eval.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace leanlab;

namespace {

constexpr auto L = Leaning::Left;
constexpr auto C = Leaning::Center;
constexpr auto R = Leaning::Right;

std::vector<Leaning> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::vector<Leaning> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(leaning_from_index(rng() % 3));
    return out;
}

std::vector<LabeledPost> run_fixture(LabelMethod method) {
    const auto registry = BiasRegistry::load(testing::snapshot_path());
    const auto corpus = read_corpus(testing::fixture_dir() / "agreement_posts.jsonl", FieldMapping{});
    LabelConfig cfg;
    cfg.method = method;
    return label_corpus(corpus.posts, registry, cfg).labeled;
}

} // namespace

TEST_CASE("metrics on a small example") {
    const std::vector<Leaning> actual = {L, L, L, C, C, R};
    const std::vector<Leaning> predicted = {L, L, C, C, R, R};
    const auto r = compute_metrics(predicted, actual);
    CHECK(r.total == 6);
    CHECK(r.accuracy == doctest::Approx(4.0 / 6.0));
    CHECK(r.confusion[0] == std::array<std::size_t, 3>{2, 1, 0});
    CHECK(r.confusion[1] == std::array<std::size_t, 3>{0, 1, 1});
    CHECK(r.confusion[2] == std::array<std::size_t, 3>{0, 0, 1});
    CHECK(r.per_class[0].precision == doctest::Approx(1.0));
    CHECK(r.per_class[0].recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.per_class[0].f1 == doctest::Approx(0.8));
    CHECK(r.per_class[1].precision == doctest::Approx(0.5));
    CHECK(r.per_class[2].precision == doctest::Approx(0.5));
    CHECK(r.per_class[2].recall == doctest::Approx(1.0));
    CHECK(r.macro_f1 == doctest::Approx((0.8 + 0.5 + 2.0 / 3.0) / 3.0));
    CHECK(r.per_class[0].support == 3);
}

TEST_CASE("perfect predictions and zero division") {
    const std::vector<Leaning> y = {L, R, R};
    const auto r = compute_metrics(y, y);
    CHECK(r.accuracy == 1.0);
    CHECK(r.per_class[1].zero_division);
    CHECK(r.per_class[1].f1 == 0.0);
    CHECK(r.per_class[0].f1 == 1.0);
    CHECK_THROWS_AS(compute_metrics(std::vector<Leaning>{L}, std::vector<Leaning>{L, R}), std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics(std::vector<Leaning>{}, std::vector<Leaning>{}), std::invalid_argument);
}

TEST_CASE("metric invariants on random label vectors") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        const auto a = random_labels(rng, n);
        const auto p = random_labels(rng, n);
        const auto r = compute_metrics(p, a);
        std::size_t sum = 0;
        std::size_t diag = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            std::size_t row = 0;
            for (std::size_t j = 0; j < 3; ++j) {
                sum += r.confusion[i][j];
                row += r.confusion[i][j];
            }
            diag += r.confusion[i][i];
            CHECK(row == r.per_class[i].support);
            for (double v : {r.per_class[i].precision, r.per_class[i].recall, r.per_class[i].f1}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
        CHECK(sum == n);
        CHECK(r.accuracy == doctest::Approx(static_cast<double>(diag) / static_cast<double>(n)));
        CHECK(compute_metrics(a, a).accuracy == 1.0);
    }
}

TEST_CASE("report tables") {
    const std::vector<Leaning> y = {L, C, R, R};
    const auto r = compute_metrics(y, y);
    const auto csv = confusion_csv(r.confusion);
    CHECK(csv.rfind("actual\\predicted,left,center,right\n", 0) == 0);
    CHECK(csv.find("right,0,0,2") != std::string::npos);
    CHECK(per_class_csv(r).find("left,") != std::string::npos);
    const auto j = to_json(r);
    CHECK(j.at("accuracy").get<double>() == 1.0);
    CHECK(top_domains_csv({{"cnn.com", 3}}) == "domain,posts\ncnn.com,3\n");
}

TEST_CASE("agreement fixture reproduces the published match counts") {
    const auto human = read_human_labels(testing::fixture_dir() / "agreement_human.csv");
    REQUIRE(human.size() == 161);

    const auto t1 = agreement(run_fixture(LabelMethod::Type1), human);
    CHECK(t1.matches == std::array<std::size_t, 3>{49, 41, 61});
    CHECK(t1.total_matches == 151);
    CHECK(t1.total == 161);
    CHECK(t1.rate == doctest::Approx(151.0 / 161.0));

    const auto t2 = agreement(run_fixture(LabelMethod::Type2Flip), human);
    CHECK(t2.matches == std::array<std::size_t, 3>{25, 41, 17});
    CHECK(t2.total_matches == 83);
}

TEST_CASE("agreement requires a heuristic label for every human label") {
    LabeledPost a;
    a.post_id = "a";
    a.label = L;
    std::vector<HumanLabel> human = {{"a", L}, {"b", R}};
    CHECK_THROWS_AS(agreement(std::vector<LabeledPost>{a}, human), DataError);
    human.pop_back();
    const auto rep = agreement(std::vector<LabeledPost>{a}, human);
    CHECK(rep.total_matches == 1);
    CHECK(rep.samples[0] == 1);
}

TEST_CASE("join keeps labeled posts in corpus order") {
    std::vector<Post> posts = {testing::make_post("p1", "one"), testing::make_post("p2", "two"),
                               testing::make_post("p3", "three")};
    LabeledPost a;
    a.post_id = "p3";
    a.label = R;
    LabeledPost b;
    b.post_id = "p1";
    b.label = L;
    LabeledPost ghost;
    ghost.post_id = "zz";
    const auto joined = join_labels(posts, {a, b, ghost});
    CHECK(joined.ids == std::vector<std::string>{"p1", "p3"});
    CHECK(joined.labels == std::vector<Leaning>{L, R});
    CHECK(joined.texts[1] == "three");
}

TEST_CASE("benchmark grid fills every cell") {
    std::mt19937_64 rng(3);
    const std::array<std::vector<std::string>, 3> vocab = {
        std::vector<std::string>{"union", "wages", "climate", "equity"},
        std::vector<std::string>{"report", "budget", "weather", "committee"},
        std::vector<std::string>{"border", "taxes", "liberty", "guns"}};
    LabeledTexts data;
    for (int i = 0; i < 150; ++i) {
        const auto k = static_cast<std::size_t>(i % 3);
        std::string text;
        for (int w = 0; w < 8; ++w) text += vocab[k][rng() % 4] + " ";
        data.ids.push_back("d" + std::to_string(i));
        data.texts.push_back(text);
        data.labels.push_back(leaning_from_index(k));
    }
    GridConfig cfg;
    cfg.models = default_grid_models(1);
    cfg.models[3].hidden = {8, 8, 8};
    cfg.models[3].learning_rate = 1e-2;
    cfg.embedding.dimension = 8;
    cfg.embedding.epochs = 2;
    const auto grid = benchmark_grid(data, cfg);
    CHECK(grid.train_size == 120);
    CHECK(grid.test_size == 30);
    CHECK(grid.cells.size() == 12);
    for (const auto& cell : grid.cells) {
        CHECK(cell.error.empty());
        REQUIRE(cell.report.has_value());
        CHECK(cell.report->total == 30);
    }
    CHECK(grid.cell(1, 1).report->accuracy >= 0.9);

    cfg.parallel = false;
    CHECK(to_json(benchmark_grid(data, cfg)) == to_json(grid));
    const auto csv = grid_csv(grid);
    CHECK(csv.rfind("representation,svm,logreg,gnb,nn\n", 0) == 0);
}
