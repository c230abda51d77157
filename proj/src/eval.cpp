#include "leanlab/eval.hpp"

#include "leanlab/error.hpp"

#include "strings.hpp"

#include <future>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace leanlab {

using nlohmann::json;

namespace {

void check_pair(std::span<const Leaning> predicted, std::span<const Leaning> actual) {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("predicted and actual label lists differ in length (" +
                                    std::to_string(predicted.size()) + " vs " + std::to_string(actual.size()) + ")");
    }
    if (actual.empty()) throw std::invalid_argument("cannot evaluate an empty label list");
}

double ratio(std::size_t num, std::size_t den, bool& zero) {
    if (den == 0) {
        zero = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ConfusionMatrix confusion_matrix(std::span<const Leaning> predicted, std::span<const Leaning> actual) {
    check_pair(predicted, actual);
    ConfusionMatrix m{};
    for (std::size_t i = 0; i < actual.size(); ++i) ++m[class_index(actual[i])][class_index(predicted[i])];
    return m;
}

EvalReport compute_metrics(std::span<const Leaning> predicted, std::span<const Leaning> actual) {
    EvalReport r;
    r.confusion = confusion_matrix(predicted, actual);
    r.total = actual.size();
    std::size_t correct = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        correct += r.confusion[k][k];
        std::size_t predicted_k = 0;
        std::size_t actual_k = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            predicted_k += r.confusion[j][k];
            actual_k += r.confusion[k][j];
        }
        auto& c = r.per_class[k];
        c.support = actual_k;
        c.precision = ratio(r.confusion[k][k], predicted_k, c.zero_division);
        c.recall = ratio(r.confusion[k][k], actual_k, c.zero_division);
        const double denom = c.precision + c.recall;
        if (denom > 0.0) {
            c.f1 = 2.0 * c.precision * c.recall / denom;
        } else {
            c.f1 = 0.0;
            c.zero_division = true;
        }
        r.macro_precision += c.precision / 3.0;
        r.macro_recall += c.recall / 3.0;
        r.macro_f1 += c.f1 / 3.0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
    return r;
}

json to_json(const EvalReport& r) {
    json per_class = json::object();
    json confusion = json::array();
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& c = r.per_class[k];
        per_class[std::string(to_string(leaning_from_index(k)))] = {{"precision", c.precision},
                                                                    {"recall", c.recall},
                                                                    {"f1", c.f1},
                                                                    {"support", c.support},
                                                                    {"zero_division", c.zero_division}};
        confusion.push_back(r.confusion[k]);
    }
    return {{"total", r.total},
            {"accuracy", r.accuracy},
            {"macro_precision", r.macro_precision},
            {"macro_recall", r.macro_recall},
            {"macro_f1", r.macro_f1},
            {"per_class", per_class},
            {"confusion", {{"order", {"left", "center", "right"}}, {"rows", "actual"}, {"columns", "predicted"}, {"counts", confusion}}}};
}

std::string confusion_csv(const ConfusionMatrix& m) {
    std::ostringstream out;
    out << "actual\\predicted,left,center,right\n";
    for (std::size_t k = 0; k < 3; ++k) {
        out << to_string(leaning_from_index(k));
        for (std::size_t j = 0; j < 3; ++j) out << ',' << m[k][j];
        out << '\n';
    }
    return out.str();
}

std::string per_class_csv(const EvalReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "class,precision,recall,f1,support,zero_division\n";
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& c = r.per_class[k];
        out << to_string(leaning_from_index(k)) << ',' << c.precision << ',' << c.recall << ',' << c.f1 << ','
            << c.support << ',' << (c.zero_division ? "true" : "false") << '\n';
    }
    return out.str();
}

AgreementReport agreement(std::span<const LabeledPost> heuristic, std::span<const HumanLabel> human) {
    std::unordered_map<std::string_view, Leaning> by_id;
    for (const auto& p : heuristic) by_id.emplace(p.post_id, p.label);
    std::vector<std::string> missing;
    AgreementReport r;
    for (const auto& h : human) {
        auto it = by_id.find(h.id);
        if (it == by_id.end()) {
            missing.push_back(h.id);
            continue;
        }
        const auto k = class_index(h.label);
        ++r.samples[k];
        ++r.total;
        if (it->second == h.label) {
            ++r.matches[k];
            ++r.total_matches;
        }
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " human-labeled id(s) have no heuristic label:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
        if (missing.size() > 20) msg += " ...";
        throw DataError(msg);
    }
    r.rate = r.total > 0 ? static_cast<double>(r.total_matches) / static_cast<double>(r.total) : 0.0;
    return r;
}

json to_json(const AgreementReport& r) {
    json per_class = json::object();
    for (std::size_t k = 0; k < 3; ++k) {
        per_class[std::string(to_string(leaning_from_index(k)))] = {{"matches", r.matches[k]}, {"samples", r.samples[k]}};
    }
    return {{"per_class", per_class}, {"total_matches", r.total_matches}, {"total", r.total}, {"rate", r.rate}};
}

std::string label_distribution_csv(const LabelSummary& s) {
    std::ostringstream out;
    out << "label,count\n";
    for (std::size_t k = 0; k < 3; ++k) out << to_string(leaning_from_index(k)) << ',' << s.counts[k] << '\n';
    return out.str();
}

std::string top_domains_csv(const std::vector<std::pair<std::string, std::size_t>>& rows) {
    std::ostringstream out;
    out << "domain,posts\n";
    for (const auto& [domain, count] : rows) out << detail::csv_escape(domain) << ',' << count << '\n';
    return out.str();
}

LabeledTexts join_labels(const std::vector<Post>& posts, const std::vector<LabeledPost>& labeled) {
    std::unordered_map<std::string_view, Leaning> by_id;
    for (const auto& p : labeled) by_id.emplace(p.post_id, p.label);
    LabeledTexts out;
    for (const auto& post : posts) {
        auto it = by_id.find(post.id);
        if (it == by_id.end()) continue;
        out.ids.push_back(post.id);
        out.texts.push_back(post.text);
        out.labels.push_back(it->second);
    }
    return out;
}

std::vector<TrainConfig> default_grid_models(std::uint64_t seed) {
    std::vector<TrainConfig> out;
    for (ModelKind kind : {ModelKind::Svm, ModelKind::LogisticRegression, ModelKind::GaussianNB, ModelKind::NeuralNet}) {
        TrainConfig c;
        c.kind = kind;
        c.seed = seed;
        out.push_back(c);
    }
    return out;
}

std::string model_column(const TrainConfig& c) {
    std::string name(to_string(c.kind));
    if (c.kind == ModelKind::Svm && c.kernel == SvmKernel::Rbf) name += "_rbf";
    return name;
}

namespace {

struct PreparedRep {
    std::unique_ptr<Vectorizer> vectorizer;
    Dataset train;
    Dataset test;
    std::string error;
};

std::vector<std::vector<std::string>> tokenize_all(const std::vector<std::string>& texts) {
    std::vector<std::vector<std::string>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(tokenize(t));
    return out;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

GridCell run_cell(const PreparedRep& rep, RepresentationKind kind, const TrainConfig& model) {
    GridCell cell;
    cell.representation = kind;
    cell.model = model;
    if (!rep.error.empty()) {
        cell.error = rep.error;
        return cell;
    }
    try {
        auto clf = train_classifier(rep.train, model);
        cell.status = clf->status();
        const auto predicted = clf->predict(rep.test.features.values);
        cell.report = compute_metrics(predicted, rep.test.labels);
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

} // namespace

GridResult benchmark_grid(const LabeledTexts& data, const GridConfig& config) {
    if (data.ids.size() != data.texts.size() || data.ids.size() != data.labels.size()) {
        throw std::invalid_argument("labeled texts differ in length");
    }
    GridResult result;
    result.representations = config.representations;
    result.models = config.models.empty() ? default_grid_models(config.seed) : config.models;

    const auto split = split_indices(data.labels, config.split_ratio, config.seed);
    result.train_size = split.train.size();
    result.test_size = split.test.size();
    const auto train_texts = pick(data.texts, split.train);
    const auto test_texts = pick(data.texts, split.test);
    const auto train_ids = pick(data.ids, split.train);
    const auto test_ids = pick(data.ids, split.test);
    const auto train_tokens = tokenize_all(train_texts);

    std::vector<PreparedRep> reps(result.representations.size());
    for (std::size_t r = 0; r < reps.size(); ++r) {
        try {
            EmbeddingConfig emb = config.embedding;
            emb.seed = config.seed;
            reps[r].vectorizer = fit_representation(result.representations[r], train_tokens, emb);
            reps[r].train.features = reps[r].vectorizer->transform(train_texts, train_ids);
            reps[r].train.labels = pick(data.labels, split.train);
            reps[r].test.features = reps[r].vectorizer->transform(test_texts, test_ids);
            reps[r].test.labels = pick(data.labels, split.test);
        } catch (const std::exception& e) {
            reps[r].error = std::string("representation failed: ") + e.what();
        }
    }

    const std::size_t n_models = result.models.size();
    result.cells.resize(reps.size() * n_models);
    if (config.parallel) {
        std::vector<std::future<GridCell>> futures;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            for (std::size_t m = 0; m < n_models; ++m) {
                futures.push_back(std::async(std::launch::async, run_cell, std::cref(reps[r]),
                                             result.representations[r], std::cref(result.models[m])));
            }
        }
        for (std::size_t i = 0; i < futures.size(); ++i) result.cells[i] = futures[i].get();
    } else {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            for (std::size_t m = 0; m < n_models; ++m) {
                result.cells[r * n_models + m] = run_cell(reps[r], result.representations[r], result.models[m]);
            }
        }
    }
    return result;
}

GridResult benchmark_grid(const std::vector<Post>& posts, const BiasRegistry& registry, const LabelConfig& labeling,
                          const GridConfig& config) {
    const auto run = label_corpus(posts, registry, labeling);
    return benchmark_grid(join_labels(posts, run.labeled), config);
}

json to_json(const GridResult& g) {
    json cells = json::array();
    for (const auto& c : g.cells) {
        json j = {{"representation", to_string(c.representation)}, {"model", model_column(c.model)}, {"config", to_json(c.model)}};
        if (c.report) {
            j["report"] = to_json(*c.report);
            j["converged"] = c.status.converged;
            if (!c.status.message.empty()) j["warning"] = c.status.message;
        } else {
            j["error"] = c.error;
        }
        cells.push_back(std::move(j));
    }
    std::vector<std::string> reps;
    for (auto r : g.representations) reps.emplace_back(to_string(r));
    std::vector<std::string> models;
    for (const auto& m : g.models) models.push_back(model_column(m));
    json table = json::array();
    for (std::size_t r = 0; r < g.representations.size(); ++r) {
        json row = json::array();
        for (std::size_t m = 0; m < g.models.size(); ++m) {
            const auto& c = g.cell(r, m);
            row.push_back(c.report ? json(c.report->accuracy) : json(nullptr));
        }
        table.push_back(std::move(row));
    }
    return {{"representations", reps},
            {"models", models},
            {"accuracy", {{"unit", "fraction"}, {"rows", table}}},
            {"train_size", g.train_size},
            {"test_size", g.test_size},
            {"cells", cells}};
}

std::string grid_csv(const GridResult& g) {
    std::ostringstream out;
    out.precision(17);
    out << "representation";
    for (const auto& m : g.models) out << ',' << model_column(m);
    out << '\n';
    for (std::size_t r = 0; r < g.representations.size(); ++r) {
        out << to_string(g.representations[r]);
        for (std::size_t m = 0; m < g.models.size(); ++m) {
            const auto& c = g.cell(r, m);
            out << ',';
            if (c.report) out << c.report->accuracy;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace leanlab
