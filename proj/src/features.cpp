#include "leanlab/features.hpp"

#include "leanlab/hash.hpp"
#include "leanlab/ingest.hpp"
#include "strings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace leanlab {

using nlohmann::json;

namespace {

bool is_token_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

bool is_handle_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_';
}

std::vector<std::pair<Eigen::Index, double>> to_pairs(const std::map<std::size_t, double>& m) {
    std::vector<std::pair<Eigen::Index, double>> out;
    out.reserve(m.size());
    for (const auto& [k, v] : m) out.emplace_back(static_cast<Eigen::Index>(k), v);
    return out;
}

Eigen::SparseVector<double> to_sparse(const std::vector<std::pair<Eigen::Index, double>>& pairs,
                                      std::size_t dim) {
    Eigen::SparseVector<double> v(static_cast<Eigen::Index>(dim));
    v.reserve(static_cast<Eigen::Index>(pairs.size()));
    for (const auto& [k, x] : pairs) v.insertBack(k) = x;
    return v;
}

std::map<std::size_t, double> term_counts(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokens) {
        if (auto i = vocab.index(t)) counts[*i] += 1.0;
    }
    return counts;
}

json vocab_to_json(const Vocabulary& v) {
    return {{"tokens", v.tokens()}, {"document_frequency", v.document_frequencies()},
            {"document_count", v.document_count()}};
}

Vocabulary vocab_from_json(const json& j) {
    return Vocabulary::from_parts(j.at("tokens").get<std::vector<std::string>>(),
                                  j.at("document_frequency").get<std::vector<std::size_t>>(),
                                  j.at("document_count").get<std::size_t>());
}

constexpr int kFormatVersion = 1;

void check_format(const json& j, std::string_view kind) {
    if (j.value("format_version", 0) != kFormatVersion) {
        throw std::invalid_argument("unsupported vectorizer format version");
    }
    if (j.value("kind", std::string{}) != kind) {
        throw std::invalid_argument("vectorizer kind mismatch, expected " + std::string(kind));
    }
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    const std::string clean = strip_urls(text);
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) tokens.push_back(detail::to_lower(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const char c = clean[i];
        const bool at_word_start = cur.empty();
        if (c == '@' && at_word_start) {
            std::size_t j = i + 1;
            while (j < clean.size() && is_handle_byte(clean[j])) ++j;
            if (j > i + 1) {
                i = j - 1;
                continue;
            }
        }
        if (is_token_byte(c)) cur.push_back(c);
        else flush();
    }
    flush();
    return tokens;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& docs) {
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::vector<std::string> uniq(doc);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq) ++df[t];
    }
    Vocabulary v;
    v.doc_count_ = docs.size();
    for (auto& [tok, n] : df) {
        v.tokens_.push_back(tok);
        v.doc_freq_.push_back(n);
    }
    v.reindex();
    return v;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq,
                                  std::size_t doc_count) {
    if (tokens.size() != doc_freq.size()) throw std::invalid_argument("vocabulary size mismatch");
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.doc_freq_ = std::move(doc_freq);
    v.doc_count_ = doc_count;
    for (auto df : v.doc_freq_) {
        if (df > doc_count) throw std::invalid_argument("document frequency exceeds document count");
    }
    v.reindex();
    return v;
}

void Vocabulary::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], i).second) throw std::invalid_argument("duplicate vocabulary token");
    }
}

std::optional<std::size_t> Vocabulary::index(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string Vocabulary::hash() const {
    std::string joined;
    for (const auto& t : tokens_) {
        joined += t;
        joined.push_back('\n');
    }
    return sha256_hex(joined);
}

// ---------------------------------------------------------------------------
// FeatureMatrix / Vectorizer
// ---------------------------------------------------------------------------

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(rows[r]);
        for (SparseRows::InnerIterator it(values, src); it; ++it) {
            trips.emplace_back(static_cast<Eigen::Index>(r), it.col(), it.value());
        }
        out.row_ids.push_back(row_ids.at(rows[r]));
    }
    out.values.setFromTriplets(trips.begin(), trips.end());
    return out;
}

std::string_view to_string(RepresentationKind k) {
    switch (k) {
    case RepresentationKind::Count: return "count";
    case RepresentationKind::Tfidf: return "tfidf";
    case RepresentationKind::Word2Vec: return "w2v";
    }
    return "count";
}

std::optional<RepresentationKind> parse_representation(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "count" || t == "bow") return RepresentationKind::Count;
    if (t == "tfidf" || t == "tf-idf") return RepresentationKind::Tfidf;
    if (t == "w2v" || t == "word2vec") return RepresentationKind::Word2Vec;
    return std::nullopt;
}

FeatureMatrix Vectorizer::transform(const std::vector<std::string>& texts,
                                    const std::vector<std::string>& ids) const {
    if (texts.size() != ids.size()) throw std::invalid_argument("texts and ids differ in length");
    FeatureMatrix fm;
    fm.row_ids = ids;
    fm.values.resize(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dimension()));
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < texts.size(); ++r) {
        for (const auto& [col, v] : encode(tokenize(texts[r]))) {
            if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value");
            trips.emplace_back(static_cast<Eigen::Index>(r), col, v);
        }
    }
    fm.values.setFromTriplets(trips.begin(), trips.end());
    fm.values.makeCompressed();
    return fm;
}

std::unique_ptr<Vectorizer> Vectorizer::from_json(const json& j) {
    const auto kind = parse_representation(j.value("kind", std::string{}));
    if (!kind) throw std::invalid_argument("unknown vectorizer kind");
    switch (*kind) {
    case RepresentationKind::Count: return std::make_unique<CountVectorizer>(CountVectorizer::from_json(j));
    case RepresentationKind::Tfidf: return std::make_unique<TfidfVectorizer>(TfidfVectorizer::from_json(j));
    case RepresentationKind::Word2Vec: return std::make_unique<EmbeddingModel>(EmbeddingModel::from_json(j));
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Count
// ---------------------------------------------------------------------------

void CountVectorizer::fit(const std::vector<std::vector<std::string>>& docs) {
    if (docs.empty()) throw std::invalid_argument("cannot fit a vectorizer on an empty corpus");
    vocab_ = Vocabulary::build(docs);
    fitted_ = true;
}

std::vector<std::pair<Eigen::Index, double>> CountVectorizer::encode(
    const std::vector<std::string>& tokens) const {
    if (!fitted_) throw std::logic_error("count vectorizer used before fit");
    return to_pairs(term_counts(vocab_, tokens));
}

Eigen::SparseVector<double> CountVectorizer::transform_count(const std::vector<std::string>& tokens) const {
    return to_sparse(encode(tokens), vocab_.size());
}

json CountVectorizer::to_json() const {
    if (!fitted_) throw std::logic_error("count vectorizer used before fit");
    return {{"format_version", kFormatVersion}, {"kind", "count"}, {"vocabulary", vocab_to_json(vocab_)}};
}

CountVectorizer CountVectorizer::from_json(const json& j) {
    check_format(j, "count");
    CountVectorizer v;
    v.vocab_ = vocab_from_json(j.at("vocabulary"));
    v.fitted_ = true;
    return v;
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

void TfidfVectorizer::fit(const std::vector<std::vector<std::string>>& docs) {
    if (docs.empty()) throw std::invalid_argument("cannot fit a vectorizer on an empty corpus");
    vocab_ = Vocabulary::build(docs);
    const double n = static_cast<double>(vocab_.document_count());
    idf_.resize(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        const double df = static_cast<double>(vocab_.document_frequency(i));
        idf_[i] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
    }
    fitted_ = true;
}

std::vector<std::pair<Eigen::Index, double>> TfidfVectorizer::encode(
    const std::vector<std::string>& tokens) const {
    if (!fitted_) throw std::logic_error("tf-idf vectorizer used before fit");
    auto weights = term_counts(vocab_, tokens);
    double sq = 0.0;
    for (auto& [k, v] : weights) {
        v *= idf_[k];
        sq += v * v;
    }
    if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (auto& [k, v] : weights) v /= norm;
    }
    return to_pairs(weights);
}

Eigen::SparseVector<double> TfidfVectorizer::transform_tfidf(const std::vector<std::string>& tokens) const {
    return to_sparse(encode(tokens), vocab_.size());
}

json TfidfVectorizer::to_json() const {
    if (!fitted_) throw std::logic_error("tf-idf vectorizer used before fit");
    return {{"format_version", kFormatVersion},
            {"kind", "tfidf"},
            {"vocabulary", vocab_to_json(vocab_)},
            {"idf", idf_}};
}

TfidfVectorizer TfidfVectorizer::from_json(const json& j) {
    check_format(j, "tfidf");
    TfidfVectorizer v;
    v.vocab_ = vocab_from_json(j.at("vocabulary"));
    v.idf_ = j.at("idf").get<std::vector<double>>();
    if (v.idf_.size() != v.vocab_.size()) throw std::invalid_argument("idf size mismatch");
    v.fitted_ = true;
    return v;
}

std::unique_ptr<Vectorizer> fit_representation(RepresentationKind kind,
                                               const std::vector<std::vector<std::string>>& docs,
                                               const EmbeddingConfig& embedding) {
    switch (kind) {
    case RepresentationKind::Count: {
        auto v = std::make_unique<CountVectorizer>();
        v->fit(docs);
        return v;
    }
    case RepresentationKind::Tfidf: {
        auto v = std::make_unique<TfidfVectorizer>();
        v->fit(docs);
        return v;
    }
    case RepresentationKind::Word2Vec:
        return std::make_unique<EmbeddingModel>(train_skipgram(docs, embedding));
    }
    return nullptr;
}

} // namespace leanlab
