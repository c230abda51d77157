#include "leanlab/cli.hpp"

#include "leanlab/annotate.hpp"
#include "leanlab/bias_registry.hpp"
#include "leanlab/error.hpp"
#include "leanlab/eval.hpp"
#include "leanlab/features.hpp"
#include "leanlab/hash.hpp"
#include "leanlab/ingest.hpp"
#include "leanlab/io.hpp"
#include "leanlab/labeler.hpp"
#include "leanlab/models.hpp"
#include "leanlab/sentiment.hpp"

#include "strings.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

namespace leanlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Options that may also come from the --config file. A flag given on the
/// command line wins over the file, the file wins over the default.
class Bindings {
public:
    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& flag, T& var, const std::string& key, const std::string& help) {
        CLI::Option* opt = app->add_option(flag, var, help);
        entries_.push_back({opt, key, [&var, key](const json& j) {
                                try {
                                    var = j.get<T>();
                                } catch (const json::exception&) {
                                    throw ConfigError("config key '" + key + "' has the wrong type");
                                }
                            },
                            [&var] { return json(var); }});
        return opt;
    }

    CLI::Option* add_flag(CLI::App* app, const std::string& flag, bool& var, const std::string& key,
                          const std::string& help) {
        CLI::Option* opt = app->add_flag(flag, var, help);
        entries_.push_back({opt, key, [&var, key](const json& j) {
                                if (!j.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
                                var = j.get<bool>();
                            },
                            [&var] { return json(var); }});
        return opt;
    }

    void apply(const json& config) const {
        for (const auto& e : entries_) {
            if (e.option->count() == 0 && config.contains(e.key)) e.set(config.at(e.key));
        }
    }

    json effective() const {
        json j = json::object();
        for (const auto& e : entries_) j[e.key] = e.get();
        return j;
    }

private:
    struct Entry {
        CLI::Option* option;
        std::string key;
        std::function<void(const json&)> set;
        std::function<json()> get;
    };
    std::vector<Entry> entries_;
};

struct Context {
    Streams io;
    fs::path out;
    std::uint64_t seed = 1;
    std::string command;
    json config;
    std::string config_hash;

    json provenance() const {
        return {{"command", command}, {"seed", seed}, {"config_hash", config_hash}, {"config", config}};
    }

    void write(const std::string& name, std::string_view content) const { write_file_atomic(out / name, content); }
    void write_json(const std::string& name, json j) const {
        j["provenance"] = provenance();
        write(name, json_text(j));
    }
};

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("no " + what + " given");
    if (!fs::is_regular_file(path)) throw DataError(what + " not found: " + path);
}

struct MappingFlags {
    std::string id = "id";
    std::string text = "text";
    std::string url;
    std::string timestamp;
    std::string platform = "other";

    void bind(Bindings& b, CLI::App* app) {
        b.add(app, "--id-field", id, "id_field", "JSON field holding the post id");
        b.add(app, "--text-field", text, "text_field", "JSON field holding the post text");
        b.add(app, "--url-field", url, "url_field", "JSON field holding a URL list (optional)");
        b.add(app, "--timestamp-field", timestamp, "timestamp_field", "JSON field holding the timestamp (optional)");
        b.add(app, "--platform", platform, "platform", "twitter, gab or other");
    }

    FieldMapping mapping() const {
        FieldMapping m;
        m.id_field = id;
        m.text_field = text;
        m.url_field = url;
        m.timestamp_field = timestamp;
        const auto p = parse_platform(platform);
        if (!p) throw ConfigError("unknown platform '" + platform + "'");
        m.platform = *p;
        return m;
    }
};

struct LexiconFlags {
    std::string pattern;
    std::string rule;
    std::string wordlist;

    void bind(Bindings& b, CLI::App* app) {
        b.add(app, "--pattern-lexicon", pattern, "pattern_lexicon", "lexicon file for the pattern analyzer");
        b.add(app, "--rule-lexicon", rule, "rule_lexicon", "lexicon file for the rule-based analyzer");
        b.add(app, "--wordlist-lexicon", wordlist, "wordlist_lexicon", "lexicon file for the wordlist analyzer");
    }

    /// Loaded lexicons live in storage; the returned pointers refer to it.
    SentimentLexicons load(std::vector<std::unique_ptr<SentimentLexicon>>& storage) const {
        SentimentLexicons lex;
        auto load_one = [&](const std::string& path, const SentimentLexicon*& slot) {
            if (path.empty()) return;
            require_file(path, "lexicon");
            storage.push_back(std::make_unique<SentimentLexicon>(SentimentLexicon::load(path)));
            slot = storage.back().get();
        };
        load_one(pattern, lex.pattern);
        load_one(rule, lex.rule);
        load_one(wordlist, lex.wordlist);
        return lex;
    }
};

Corpus load_corpus(const std::string& path, const MappingFlags& flags, bool gab_filter) {
    require_file(path, "corpus");
    Corpus corpus = read_corpus(path, flags.mapping());
    if (gab_filter) corpus.posts = filter_gab(std::move(corpus.posts));
    return corpus;
}

BiasRegistry load_registry(const std::string& path) {
    require_file(path, "registry");
    return BiasRegistry::load(path);
}

LabelMethod label_method(const std::string& method, const std::string& mode) {
    if (method == "type1") return LabelMethod::Type1;
    if (method != "type2") throw ConfigError("unknown labeling method '" + method + "'");
    if (mode == "flip") return LabelMethod::Type2Flip;
    if (mode == "scale") return LabelMethod::Type2Scale;
    throw ConfigError("unknown sentiment mode '" + mode + "'");
}

RepresentationKind representation(const std::string& name) {
    const auto r = parse_representation(name);
    if (!r) throw ConfigError("unknown representation '" + name + "'");
    return *r;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto t = detail::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

json counts_json(const std::array<std::size_t, 3>& counts) {
    json j = json::object();
    for (std::size_t k = 0; k < 3; ++k) j[std::string(to_string(leaning_from_index(k)))] = counts[k];
    return j;
}

struct EmbeddingFlags {
    int dimension = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    int min_count = 2;

    void bind(Bindings& b, CLI::App* app) {
        b.add(app, "--emb-dim", dimension, "embedding_dimension", "word vector dimension");
        b.add(app, "--emb-window", window, "embedding_window", "skip-gram context window");
        b.add(app, "--emb-negatives", negatives, "embedding_negatives", "negative samples per pair");
        b.add(app, "--emb-epochs", epochs, "embedding_epochs", "skip-gram passes over the corpus");
        b.add(app, "--emb-lr", learning_rate, "embedding_learning_rate", "initial skip-gram learning rate");
        b.add(app, "--emb-min-count", min_count, "embedding_min_count", "minimum token count");
    }

    EmbeddingConfig config(std::uint64_t seed) const {
        EmbeddingConfig c;
        c.dimension = dimension;
        c.window = window;
        c.negatives = negatives;
        c.epochs = epochs;
        c.learning_rate = learning_rate;
        c.min_count = min_count;
        c.seed = seed;
        c.validate();
        return c;
    }
};

struct ModelFlags {
    std::string model = "logreg";
    std::string kernel = "linear";
    double C = 1.0;
    double learning_rate = 1e-6;
    int epochs = 0;
    int batch_size = 32;
    std::string hidden = "128,64,32";
    double tolerance = 1e-5;
    long long max_dual_iterations = 10'000'000;

    void bind(Bindings& b, CLI::App* app, bool with_model) {
        if (with_model) b.add(app, "--model", model, "model", "gnb, logreg, svm or nn");
        b.add(app, "--kernel", kernel, "kernel", "SVM kernel: linear or rbf");
        b.add(app, "--C", C, "C", "inverse regularization strength");
        b.add(app, "--lr", learning_rate, "learning_rate", "neural net learning rate");
        b.add(app, "--epochs", epochs, "epochs", "training epochs (0 = model default)");
        b.add(app, "--batch-size", batch_size, "batch_size", "neural net mini-batch size");
        b.add(app, "--hidden", hidden, "hidden", "three hidden layer widths, comma separated");
        b.add(app, "--tolerance", tolerance, "tolerance", "logistic regression gradient tolerance");
        b.add(app, "--max-dual-iterations", max_dual_iterations, "max_dual_iterations", "RBF SVM iteration cap");
    }

    TrainConfig config(const std::string& kind_name, std::uint64_t seed) const {
        TrainConfig c;
        const auto kind = parse_model_kind(kind_name);
        if (!kind) throw ConfigError("unknown model '" + kind_name + "'");
        c.kind = *kind;
        const auto k = parse_kernel(kernel);
        if (!k) throw ConfigError("unknown kernel '" + kernel + "'");
        c.kernel = *k;
        c.C = C;
        c.learning_rate = learning_rate;
        c.epochs = epochs;
        c.batch_size = batch_size;
        c.tolerance = tolerance;
        c.max_dual_iterations = max_dual_iterations;
        c.seed = seed;
        const auto widths = split_list(hidden);
        if (widths.size() != 3) throw ConfigError("--hidden needs three comma-separated widths");
        for (std::size_t i = 0; i < 3; ++i) {
            try {
                c.hidden[i] = std::stoi(widths[i]);
            } catch (const std::exception&) {
                throw ConfigError("bad hidden width '" + widths[i] + "'");
            }
        }
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return c;
    }
};

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v.at(i));
    return out;
}

std::vector<std::vector<std::string>> tokenize_all(const std::vector<std::string>& texts) {
    std::vector<std::vector<std::string>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(tokenize(t));
    return out;
}

LabeledTexts load_labeled(const std::string& corpus_path, const std::string& labels_path, const MappingFlags& mapping) {
    require_file(labels_path, "labels file");
    const Corpus corpus = load_corpus(corpus_path, mapping, false);
    const auto labels = read_labels_jsonl(labels_path);
    LabeledTexts data = join_labels(corpus.posts, labels);
    if (data.ids.empty()) throw DataError("no post in " + corpus_path + " has a label in " + labels_path);
    return data;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Command {
    CLI::App* app = nullptr;
    Bindings bindings;
    std::function<void(Context&)> run;
};

void registry_stats(Context& ctx, const std::string& path) {
    const auto registry = load_registry(path);
    std::array<std::size_t, 3> counts{};
    for (std::size_t k = 0; k < 3; ++k) counts[k] = registry.count(leaning_from_index(k));
    ctx.write_json("registry_stats.json", {{"counts", counts_json(counts)}, {"total", registry.size()}});
    ctx.io.out << json{{"counts", counts_json(counts)}, {"total", registry.size()}}.dump() << '\n';
}

} // namespace

int run_subcommand(const std::vector<std::string>& args, Streams io) {
    CLI::App app{"Political leaning labels, features and classifiers for social media posts", "leanlab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    std::string config_path;
    std::string out_dir = ".";
    CLI::Option* seed_opt = app.add_option("--seed", seed, "seed for every random choice");
    app.add_option("--config", config_path, "JSON file of option defaults");
    app.add_option("--out", out_dir, "output directory");

    std::map<std::string, Command> commands;

    // registry stats
    std::string registry_path;
    CLI::App* registry_app = app.add_subcommand("registry", "news-domain registry");
    registry_app->require_subcommand(1);
    {
        auto& cmd = commands["registry stats"];
        cmd.app = registry_app->add_subcommand("stats", "class counts of a registry snapshot");
        cmd.bindings.add(cmd.app, "registry,--registry", registry_path, "registry", "registry CSV (domain,rating)");
        cmd.run = [&](Context& ctx) { registry_stats(ctx, registry_path); };
    }

    // ingest stats
    std::string corpus_path;
    MappingFlags mapping;
    bool gab_filter = false;
    std::size_t top_k = 20;
    CLI::App* ingest_app = app.add_subcommand("ingest", "corpus ingestion");
    ingest_app->require_subcommand(1);
    {
        auto& cmd = commands["ingest stats"];
        cmd.app = ingest_app->add_subcommand("stats", "post and domain counts of a corpus");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--registry", registry_path, "registry", "count only domains this registry rates");
        cmd.bindings.add_flag(cmd.app, "--gab-filter", gab_filter, "gab_filter", "keep posts with a URL and more than five words");
        cmd.bindings.add(cmd.app, "--top", top_k, "top", "number of top domains to report");
        mapping.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            const Corpus corpus = load_corpus(corpus_path, mapping, gab_filter);
            std::optional<BiasRegistry> registry;
            if (!registry_path.empty()) registry = load_registry(registry_path);
            const auto stats = corpus_stats(corpus.posts, registry ? &*registry : nullptr);
            const auto top = top_domains(stats, top_k);
            json top_json = json::array();
            for (const auto& [d, n] : top) top_json.push_back({{"domain", d}, {"posts", n}});
            ctx.write_json("ingest_stats.json", {{"post_count", stats.post_count},
                                                 {"skipped", corpus.skipped},
                                                 {"unique_domains", stats.domain_frequency.size()},
                                                 {"top_domains", top_json}});
            ctx.write("top_domains.csv", top_domains_csv(top));
            ctx.io.out << "posts " << stats.post_count << "\nskipped " << corpus.skipped << "\nunique domains "
                       << stats.domain_frequency.size() << '\n';
        };
    }

    // sentiment
    LexiconFlags lexicons;
    std::string text;
    {
        auto& cmd = commands["sentiment"];
        cmd.app = app.add_subcommand("sentiment", "sentiment scores of posts or a single text");
        cmd.bindings.add(cmd.app, "corpus,--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--text", text, "text", "score this text and print the result");
        mapping.bind(cmd.bindings, cmd.app);
        lexicons.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            std::vector<std::unique_ptr<SentimentLexicon>> storage;
            const auto lex = lexicons.load(storage);
            auto score_json = [](const SentimentScore& s) {
                return json{{"alpha", s.alpha}, {"beta", s.beta}, {"gamma", s.gamma}, {"tau", s.tau}};
            };
            if (!text.empty()) {
                ctx.io.out << score_json(analyze_sentiment(text, lex)).dump() << '\n';
                return;
            }
            const Corpus corpus = load_corpus(corpus_path, mapping, false);
            std::string lines;
            double tau_sum = 0.0;
            std::array<std::size_t, 3> polarity{};
            for (const auto& post : corpus.posts) {
                const auto s = analyze_sentiment(post.text, lex);
                json j = score_json(s);
                j["id"] = post.id;
                lines += j.dump() + "\n";
                tau_sum += s.tau;
                ++polarity[s.tau < 0.0 ? 0 : s.tau > 0.0 ? 2 : 1];
            }
            const double mean = corpus.posts.empty() ? 0.0 : tau_sum / static_cast<double>(corpus.posts.size());
            ctx.write("sentiment.jsonl", lines);
            ctx.write_json("sentiment_summary.json", {{"posts", corpus.posts.size()},
                                                      {"mean_tau", mean},
                                                      {"negative", polarity[0]},
                                                      {"neutral", polarity[1]},
                                                      {"positive", polarity[2]}});
            ctx.io.out << "posts " << corpus.posts.size() << "\nmean tau " << mean << '\n';
        };
    }

    // label
    std::string method = "type1";
    std::string mode = "flip";
    {
        auto& cmd = commands["label"];
        cmd.app = app.add_subcommand("label", "heuristic leaning labels");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--registry", registry_path, "registry", "registry CSV");
        cmd.bindings.add(cmd.app, "--method", method, "method", "type1 (domains) or type2 (domains and sentiment)")
            ->check(CLI::IsMember({"type1", "type2"}));
        cmd.bindings.add(cmd.app, "--mode,--type2-mode", mode, "mode", "type2 sentiment mode: flip or scale")
            ->check(CLI::IsMember({"flip", "scale"}));
        cmd.bindings.add_flag(cmd.app, "--gab-filter", gab_filter, "gab_filter", "keep posts with a URL and more than five words");
        mapping.bind(cmd.bindings, cmd.app);
        lexicons.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            const auto registry = load_registry(registry_path);
            const Corpus corpus = load_corpus(corpus_path, mapping, gab_filter);
            std::vector<std::unique_ptr<SentimentLexicon>> storage;
            LabelConfig config;
            config.method = label_method(method, mode);
            config.lexicons = lexicons.load(storage);
            const auto run = label_corpus(corpus.posts, registry, config);
            ctx.write("labels.jsonl", labels_jsonl(run.labeled));
            ctx.write_json("label_summary.json", {{"method", to_string(config.method)},
                                                  {"posts", corpus.posts.size()},
                                                  {"skipped_lines", corpus.skipped},
                                                  {"labeled", run.summary.labeled()},
                                                  {"unlabeled", run.summary.unlabeled},
                                                  {"counts", counts_json(run.summary.counts)}});
            ctx.write("label_distribution.csv", label_distribution_csv(run.summary));
            ctx.io.out << "labeled " << run.summary.labeled() << " of " << corpus.posts.size() << " (left "
                       << run.summary.counts[0] << ", center " << run.summary.counts[1] << ", right "
                       << run.summary.counts[2] << ")\n";
        };
    }

    // featurize
    std::string labels_path;
    std::string rep = "tfidf";
    double split_ratio = 0.8;
    EmbeddingFlags embedding;
    {
        auto& cmd = commands["featurize"];
        cmd.app = app.add_subcommand("featurize", "fit a text representation on the training split");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--labels", labels_path, "labels", "labels.jsonl from the label step");
        cmd.bindings.add(cmd.app, "--rep", rep, "representation", "count, tfidf or w2v")
            ->check(CLI::IsMember({"count", "tfidf", "w2v"}));
        cmd.bindings.add(cmd.app, "--split-ratio", split_ratio, "split_ratio", "training fraction");
        mapping.bind(cmd.bindings, cmd.app);
        embedding.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            const auto data = load_labeled(corpus_path, labels_path, mapping);
            const auto split = split_indices(data.labels, split_ratio, ctx.seed);
            const auto train_texts = pick(data.texts, split.train);
            const auto vec = fit_representation(representation(rep), tokenize_all(train_texts), embedding.config(ctx.seed));
            const json split_json = {{"seed", ctx.seed}, {"ratio", split_ratio}};
            ctx.write_json("vectorizer.json", {{"vectorizer", vec->to_json()},
                                               {"vocabulary_hash", vec->vocabulary_hash()},
                                               {"dimension", vec->dimension()},
                                               {"split", split_json}});
            ctx.write_json("split.json", {{"split", split_json},
                                          {"train", pick(data.ids, split.train)},
                                          {"test", pick(data.ids, split.test)}});
            std::string lines;
            auto emit = [&](const std::vector<std::size_t>& rows, std::string_view side) {
                for (auto i : rows) {
                    json entries = json::array();
                    for (const auto& [col, val] : vec->encode(tokenize(data.texts[i]))) entries.push_back({col, val});
                    lines += json{{"id", data.ids[i]}, {"split", side}, {"label", to_string(data.labels[i])}, {"features", entries}}
                                 .dump() +
                             "\n";
                }
            };
            emit(split.train, "train");
            emit(split.test, "test");
            ctx.write("features.jsonl", lines);
            ctx.io.out << to_string(vec->kind()) << " dimension " << vec->dimension() << ", train " << split.train.size()
                       << ", test " << split.test.size() << '\n';
        };
    }

    // train
    std::string vectorizer_path;
    ModelFlags model_flags;
    std::size_t few_shot = 0;
    std::size_t pool_size = 0;
    {
        auto& cmd = commands["train"];
        cmd.app = app.add_subcommand("train", "train a classifier on the training split");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--labels", labels_path, "labels", "labels.jsonl from the label step");
        cmd.bindings.add(cmd.app, "--rep", rep, "representation", "count, tfidf or w2v")
            ->check(CLI::IsMember({"count", "tfidf", "w2v"}));
        cmd.bindings.add(cmd.app, "--vectorizer", vectorizer_path, "vectorizer", "vectorizer.json from featurize (overrides --rep)");
        cmd.bindings.add(cmd.app, "--split-ratio", split_ratio, "split_ratio", "training fraction");
        cmd.bindings.add(cmd.app, "--few-shot", few_shot, "few_shot", "train on this many rows per class (0 = all)");
        cmd.bindings.add(cmd.app, "--pool-size", pool_size, "pool_size", "evaluation pool size (0 = whole test split)");
        model_flags.bind(cmd.bindings, cmd.app, true);
        mapping.bind(cmd.bindings, cmd.app);
        embedding.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            const TrainConfig config = model_flags.config(model_flags.model, ctx.seed);
            const auto data = load_labeled(corpus_path, labels_path, mapping);
            const auto split = split_indices(data.labels, split_ratio, ctx.seed);
            std::vector<std::size_t> train_rows = split.train;
            if (few_shot > 0) {
                const auto labels = pick(data.labels, split.train);
                train_rows = pick(split.train, few_shot_indices(labels, few_shot, ctx.seed));
            }
            std::unique_ptr<Vectorizer> vec;
            if (!vectorizer_path.empty()) {
                require_file(vectorizer_path, "vectorizer");
                vec = Vectorizer::from_json(read_json_file(vectorizer_path).at("vectorizer"));
            } else {
                vec = fit_representation(representation(rep), tokenize_all(pick(data.texts, split.train)),
                                         embedding.config(ctx.seed));
            }
            Dataset train;
            train.features = vec->transform(pick(data.texts, train_rows), pick(data.ids, train_rows));
            train.labels = pick(data.labels, train_rows);
            const auto clf = train_classifier(train, config);
            if (!clf->status().converged) ctx.io.err << "warning: " << clf->status().message << '\n';
            ctx.write_json("model.json", {{"format_version", 1},
                                          {"train_config", to_json(config)},
                                          {"classifier", clf->to_json()},
                                          {"vectorizer", vec->to_json()},
                                          {"vocabulary_hash", vec->vocabulary_hash()},
                                          {"split", {{"seed", ctx.seed}, {"ratio", split_ratio}}},
                                          {"few_shot", {{"per_class", few_shot}, {"pool_size", pool_size}}},
                                          {"train_rows", train_rows.size()}});
            ctx.io.out << to_string(config.kind) << " trained on " << train_rows.size() << " rows\n";
        };
    }

    // eval
    std::string model_path;
    {
        auto& cmd = commands["eval"];
        cmd.app = app.add_subcommand("eval", "evaluate a trained model on its test split");
        cmd.bindings.add(cmd.app, "--model", model_path, "model_file", "model.json from train");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--labels", labels_path, "labels", "labels.jsonl from the label step");
        mapping.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            require_file(model_path, "model file");
            const json model = read_json_file(model_path);
            if (model.value("format_version", 0) != 1) throw DataError(model_path + ": unsupported model format");
            const auto clf = Classifier::from_json(model.at("classifier"));
            const auto vec = Vectorizer::from_json(model.at("vectorizer"));
            if (vec->vocabulary_hash() != model.at("vocabulary_hash").get<std::string>()) {
                throw DataError(model_path + ": vocabulary hash does not match the embedded vectorizer");
            }
            const auto data = load_labeled(corpus_path, labels_path, mapping);
            const auto split_seed = model.at("split").at("seed").get<std::uint64_t>();
            const auto ratio = model.at("split").at("ratio").get<double>();
            auto test_rows = split_indices(data.labels, ratio, split_seed).test;
            const auto pool = model.at("few_shot").value("pool_size", std::size_t{0});
            if (pool > 0 && pool < test_rows.size()) test_rows.resize(pool);
            const auto x = vec->transform(pick(data.texts, test_rows), pick(data.ids, test_rows));
            const auto predicted = clf->predict(x.values);
            const auto report = compute_metrics(predicted, pick(data.labels, test_rows));
            ctx.write_json("eval.json", {{"report", to_json(report)},
                                         {"model", to_string(clf->kind())},
                                         {"split", model.at("split")},
                                         {"test_size", test_rows.size()}});
            ctx.write("confusion.csv", confusion_csv(report.confusion));
            ctx.write("per_class.csv", per_class_csv(report));
            ctx.io.out << "accuracy " << report.accuracy << "\nmacro f1 " << report.macro_f1 << '\n';
        };
    }

    // agree
    std::string human_path;
    {
        auto& cmd = commands["agree"];
        cmd.app = app.add_subcommand("agree", "agreement of heuristic labels with human labels");
        cmd.bindings.add(cmd.app, "--labels", labels_path, "labels", "labels.jsonl from the label step");
        cmd.bindings.add(cmd.app, "--human", human_path, "human", "human label CSV (id,label)");
        cmd.run = [&](Context& ctx) {
            require_file(labels_path, "labels file");
            require_file(human_path, "human label file");
            const auto heuristic = read_labels_jsonl(labels_path);
            const auto human = read_human_labels(human_path);
            const auto report = agreement(heuristic, human);
            ctx.write_json("agreement.json", to_json(report));
            ctx.io.out << "matches " << report.total_matches << " of " << report.total << " (left " << report.matches[0]
                       << ", center " << report.matches[1] << ", right " << report.matches[2] << ")\n";
        };
    }

    // annotate
    std::size_t sample_size = 161;
    std::string annotation_output = "human_labels.csv";
    {
        auto& cmd = commands["annotate"];
        cmd.app = app.add_subcommand("annotate", "interactive human labeling of a post sample");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--registry", registry_path, "registry", "registry CSV");
        cmd.bindings.add(cmd.app, "--sample", sample_size, "sample", "number of posts to label");
        cmd.bindings.add(cmd.app, "--output", annotation_output, "output", "label CSV inside the output directory");
        mapping.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            if (!ctx.io.interactive) throw ConfigError("annotate needs an interactive terminal on standard input");
            const auto registry = load_registry(registry_path);
            const Corpus corpus = load_corpus(corpus_path, mapping, false);
            const auto sample = annotation_sample(corpus.posts, registry, sample_size, ctx.seed);
            const fs::path csv_path = ctx.out / annotation_output;
            fs::path log_path = csv_path;
            log_path += ".log";
            std::set<std::string> done;
            {
                std::ifstream prior_csv(csv_path);
                std::ifstream prior_log(log_path);
                done = annotated_ids(prior_csv ? &prior_csv : nullptr, prior_log ? &prior_log : nullptr);
            }
            fs::create_directories(ctx.out);
            const bool fresh = !fs::exists(csv_path);
            std::ofstream labels_out(csv_path, std::ios::app);
            std::ofstream log_out(log_path, std::ios::app);
            if (!labels_out || !log_out) throw DataError("cannot write " + csv_path.string());
            if (fresh) labels_out << "id,label\n";
            const auto outcome = annotate_session(sample, registry, done, ctx.io.in, ctx.io.out, labels_out, log_out);
            ctx.io.out << "\nlabeled " << outcome.labeled.size() << " (" << outcome.auto_center << " center-linked), skipped "
                       << outcome.skipped.size() << (outcome.quit ? ", session paused" : "") << '\n';
        };
    }

    // report
    std::string reps = "count,tfidf,w2v";
    std::string models = "svm,logreg,gnb,nn";
    std::string format = "json";
    {
        auto& cmd = commands["report"];
        cmd.app = app.add_subcommand("report", "accuracy grid over representations and classifiers");
        cmd.bindings.add(cmd.app, "--corpus", corpus_path, "corpus", "JSONL corpus");
        cmd.bindings.add(cmd.app, "--registry", registry_path, "registry", "registry CSV");
        cmd.bindings.add(cmd.app, "--method", method, "method", "type1 or type2")->check(CLI::IsMember({"type1", "type2"}));
        cmd.bindings.add(cmd.app, "--mode,--type2-mode", mode, "mode", "flip or scale")->check(CLI::IsMember({"flip", "scale"}));
        cmd.bindings.add_flag(cmd.app, "--gab-filter", gab_filter, "gab_filter", "keep posts with a URL and more than five words");
        cmd.bindings.add(cmd.app, "--reps", reps, "representations", "comma-separated representations");
        cmd.bindings.add(cmd.app, "--models", models, "models", "comma-separated models");
        cmd.bindings.add(cmd.app, "--split-ratio", split_ratio, "split_ratio", "training fraction");
        cmd.bindings.add(cmd.app, "--format", format, "format", "grid table format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd.bindings.add(cmd.app, "--top", top_k, "top", "number of top domains in the figure data");
        model_flags.bind(cmd.bindings, cmd.app, false);
        mapping.bind(cmd.bindings, cmd.app);
        lexicons.bind(cmd.bindings, cmd.app);
        embedding.bind(cmd.bindings, cmd.app);
        cmd.run = [&](Context& ctx) {
            const auto registry = load_registry(registry_path);
            const Corpus corpus = load_corpus(corpus_path, mapping, gab_filter);
            std::vector<std::unique_ptr<SentimentLexicon>> storage;
            LabelConfig labeling;
            labeling.method = label_method(method, mode);
            labeling.lexicons = lexicons.load(storage);
            GridConfig grid;
            grid.representations.clear();
            for (const auto& r : split_list(reps)) grid.representations.push_back(representation(r));
            for (const auto& m : split_list(models)) grid.models.push_back(model_flags.config(m, ctx.seed));
            if (grid.representations.empty() || grid.models.empty()) throw ConfigError("empty representation or model list");
            grid.split_ratio = split_ratio;
            grid.seed = ctx.seed;
            grid.embedding = embedding.config(ctx.seed);

            const auto run = label_corpus(corpus.posts, registry, labeling);
            const auto result = benchmark_grid(join_labels(corpus.posts, run.labeled), grid);
            if (format == "csv") ctx.write("grid.csv", grid_csv(result));
            else ctx.write_json("grid.json", to_json(result));
            ctx.write("figures/label_distribution.csv", label_distribution_csv(run.summary));
            ctx.write("figures/top_domains.csv", top_domains_csv(top_domains(corpus_stats(corpus.posts, &registry), top_k)));
            for (const auto& cell : result.cells) {
                if (!cell.report) continue;
                const std::string stem = std::string(to_string(cell.representation)) + "_" + model_column(cell.model);
                ctx.write("figures/confusion_" + stem + ".csv", confusion_csv(cell.report->confusion));
                ctx.write("figures/per_class_" + stem + ".csv", per_class_csv(*cell.report));
            }
            ctx.io.out << grid_csv(result);
            for (const auto& cell : result.cells) {
                if (!cell.report) {
                    ctx.io.err << "cell " << to_string(cell.representation) << '/' << model_column(cell.model)
                               << " failed: " << cell.error << '\n';
                } else if (!cell.status.converged) {
                    ctx.io.err << "warning: " << to_string(cell.representation) << '/' << model_column(cell.model) << ": "
                               << cell.status.message << '\n';
                }
            }
        };
    }

    std::vector<std::string> reversed;
    if (args.size() > 1) reversed.assign(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        io.err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    Command* selected = nullptr;
    std::string selected_name;
    for (auto& [name, cmd] : commands) {
        if (cmd.app->parsed()) {
            selected = &cmd;
            selected_name = name;
        }
    }
    if (selected == nullptr) {
        io.err << "error: no subcommand\n\n" << app.help();
        return kExitUsage;
    }

    try {
        json file_config = json::object();
        if (!config_path.empty()) {
            require_file(config_path, "config file");
            file_config = read_json_file(config_path);
            if (!file_config.is_object()) throw ConfigError("config file must hold a JSON object");
        }
        selected->bindings.apply(file_config);
        if (seed_opt->count() == 0 && file_config.contains("seed")) seed = file_config.at("seed").get<std::uint64_t>();

        Context ctx{io, fs::path(out_dir), seed, selected_name, {}, {}};
        ctx.config = selected->bindings.effective();
        ctx.config["command"] = selected_name;
        ctx.config["seed"] = seed;
        ctx.config_hash = sha256_hex(ctx.config.dump());
        selected->run(ctx);
        return kExitOk;
    } catch (const std::exception& e) {
        io.err << "error: " << selected_name << ": " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace leanlab::cli
