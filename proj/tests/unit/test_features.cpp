#include "leanlab/features.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace leanlab;

using Tokens = std::vector<std::string>;

TEST_CASE("tokenize rules") {
    CHECK(tokenize("Great win! https://a.com @bob #MAGA") == Tokens{"great", "win", "maga"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("A.B.C 2020") == Tokens{"2020"});
    CHECK(tokenize("café über") == Tokens{"café", "über"});
}

TEST_CASE("count vectorizer") {
    CountVectorizer v;
    CHECK_THROWS_AS(v.transform_count({"b"}), std::logic_error);
    CHECK_THROWS_AS(v.fit({}), std::invalid_argument);
    v.fit({{"aa", "bb"}, {"bb", "cc"}});
    CHECK(v.dimension() == 3);
    const auto x = v.transform_count({"bb", "bb"});
    CHECK(x.size() == 3);
    CHECK(x.nonZeros() == 1);
    CHECK(x.coeff(*v.vocabulary().index("bb")) == 2.0);
    CHECK(v.transform_count({"zz", "yy"}).nonZeros() == 0);
    CHECK(v.vocabulary().tokens() == Tokens{"aa", "bb", "cc"});
    CHECK(v.vocabulary().document_frequency(*v.vocabulary().index("bb")) == 2);
}

TEST_CASE("tfidf idf values") {
    TfidfVectorizer v;
    v.fit({{"xx", "yy"}, {"xx"}});
    CHECK(v.idf()[*v.vocabulary().index("xx")] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.idf()[*v.vocabulary().index("yy")] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-15));

    TfidfVectorizer one;
    one.fit({{"solo", "word"}});
    for (double idf : one.idf()) CHECK(idf == doctest::Approx(1.0));
}

TEST_CASE("tfidf matches a direct computation") {
    const std::vector<Tokens> docs = {{"the", "cat", "sat"}, {"the", "dog", "sat", "sat"}, {"a", "cat"}, {"the", "end"}};
    TfidfVectorizer v;
    v.fit(docs);
    const double n = static_cast<double>(docs.size());
    for (const auto& doc : docs) {
        std::map<std::string, double> tf;
        for (const auto& t : doc) tf[t] += 1.0;
        std::map<std::string, double> expected;
        double norm = 0.0;
        for (const auto& [t, c] : tf) {
            double df = 0.0;
            for (const auto& d : docs) df += std::set<std::string>(d.begin(), d.end()).count(t) ? 1.0 : 0.0;
            expected[t] = c * (std::log((1.0 + n) / (1.0 + df)) + 1.0);
            norm += expected[t] * expected[t];
        }
        const auto row = v.transform_tfidf(doc);
        CHECK(row.size() == static_cast<Eigen::Index>(v.dimension()));
        for (const auto& [t, val] : expected) {
            CHECK(std::abs(row.coeff(*v.vocabulary().index(t)) - val / std::sqrt(norm)) < 1e-12);
        }
        CHECK(std::abs(row.norm() - 1.0) < 1e-9);
    }
    CHECK(v.transform_tfidf({"unknown"}).norm() == 0.0);
}

TEST_CASE("transform yields one row per text with the vocabulary width") {
    std::mt19937_64 rng(2);
    const Tokens words = {"red", "green", "blue", "cyan", "pink", "gold"};
    std::vector<std::string> texts;
    std::vector<std::string> ids;
    std::vector<Tokens> docs;
    for (int i = 0; i < 50; ++i) {
        std::string t;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) t += words[rng() % words.size()] + " ";
        texts.push_back(t);
        ids.push_back("p" + std::to_string(i));
        docs.push_back(tokenize(t));
    }
    TfidfVectorizer tfidf;
    tfidf.fit(docs);
    CountVectorizer count;
    count.fit(docs);
    for (const Vectorizer* v : {static_cast<const Vectorizer*>(&tfidf), static_cast<const Vectorizer*>(&count)}) {
        const auto m = v->transform(texts, ids);
        CHECK(m.rows() == 50);
        CHECK(m.cols() == static_cast<Eigen::Index>(v->dimension()));
        CHECK(m.row_ids == ids);
        CHECK(m.dense().allFinite());
    }
}

TEST_CASE("vectorizers round-trip through JSON") {
    const std::vector<Tokens> docs = {{"aa", "bb", "bb"}, {"cc", "aa"}};
    TfidfVectorizer v;
    v.fit(docs);
    const auto back = Vectorizer::from_json(nlohmann::json::parse(v.to_json().dump()));
    CHECK(back->kind() == RepresentationKind::Tfidf);
    CHECK(back->vocabulary_hash() == v.vocabulary_hash());
    CHECK(back->encode({"bb", "cc"}) == v.encode({"bb", "cc"}));

    CountVectorizer c;
    c.fit(docs);
    const auto cback = Vectorizer::from_json(c.to_json());
    CHECK(cback->kind() == RepresentationKind::Count);
    CHECK(cback->encode({"aa", "aa"}) == c.encode({"aa", "aa"}));
}

TEST_CASE("vocabulary hash depends only on the token list") {
    CountVectorizer a;
    a.fit({{"xx", "yy"}});
    CountVectorizer b;
    b.fit({{"yy"}, {"xx", "xx"}});
    CHECK(a.vocabulary_hash() == b.vocabulary_hash());
    CountVectorizer c;
    c.fit({{"xx", "zz"}});
    CHECK(a.vocabulary_hash() != c.vocabulary_hash());
}

TEST_CASE("representation names") {
    CHECK(parse_representation("tfidf") == RepresentationKind::Tfidf);
    CHECK(parse_representation("count") == RepresentationKind::Count);
    CHECK(parse_representation("w2v") == RepresentationKind::Word2Vec);
    CHECK_FALSE(parse_representation("bert").has_value());
}
