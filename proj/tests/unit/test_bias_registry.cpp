#include "leanlab/bias_registry.hpp"
#include "leanlab/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace leanlab;
using testing::registry_from;

TEST_CASE("normalize_domain strips scheme, www, path, query and port") {
    CHECK(normalize_domain("https://www.FoxNews.com/politics/story?id=1") == "foxnews.com");
    CHECK(normalize_domain("edition.cnn.com") == "edition.cnn.com");
    CHECK(normalize_domain("HTTP://WWW.X.COM") == "x.com");
    CHECK(normalize_domain("http://user@news.example.org:8080/a#b") == "news.example.org");
    CHECK(normalize_domain("www.bbc.co.uk.") == "bbc.co.uk");
    CHECK_THROWS_AS(normalize_domain("not a url"), DataError);
    CHECK_THROWS_AS(normalize_domain(""), DataError);
    CHECK_THROWS_AS(normalize_domain("https:///path"), DataError);
}

TEST_CASE("normalize_domain is idempotent on random hosts") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcxyz019-";
    const std::vector<std::string> prefixes = {"", "http://", "https://www.", "www.", "HTTPS://WWW.WWW."};
    for (int i = 0; i < 500; ++i) {
        std::string host;
        const int labels = 2 + static_cast<int>(rng() % 3);
        for (int l = 0; l < labels; ++l) {
            if (l > 0) host += '.';
            const int len = 1 + static_cast<int>(rng() % 6);
            for (int c = 0; c < len; ++c) host += alphabet[rng() % (alphabet.size() - 1)];
        }
        const std::string raw = prefixes[rng() % prefixes.size()] + host + (rng() % 2 ? "/p?q=1" : "");
        const std::string once = normalize_domain(raw);
        CHECK(normalize_domain(once) == once);
        CHECK(once.find('/') == std::string::npos);
    }
}

TEST_CASE("registrable_apex keeps two-part public suffixes") {
    CHECK(registrable_apex("edition.cnn.com") == "cnn.com");
    CHECK(registrable_apex("cnn.com") == "cnn.com");
    CHECK(registrable_apex("news.bbc.co.uk") == "bbc.co.uk");
}

TEST_CASE("rating_to_leaning merges the far ratings") {
    CHECK(rating_to_leaning("far-left") == Leaning::Left);
    CHECK(rating_to_leaning("Far-Right") == Leaning::Right);
    CHECK(rating_to_leaning(" center ") == Leaning::Center);
    CHECK_FALSE(rating_to_leaning("mixed").has_value());
}

TEST_CASE("registry parse contracts") {
    SUBCASE("header only gives an empty registry") {
        const auto r = registry_from("domain,rating\n");
        CHECK(r.size() == 0);
        CHECK(r.empty());
    }
    SUBCASE("duplicate domain is rejected") {
        CHECK_THROWS_AS(registry_from("domain,rating\nfoo.com,left\nfoo.com,right\n"), DataError);
    }
    SUBCASE("duplicates after normalization are rejected") {
        CHECK_THROWS_AS(registry_from("domain,rating\nfoo.com,left\nhttps://www.foo.com/,left\n"), DataError);
    }
    SUBCASE("unknown rating names the line") {
        try {
            registry_from("domain,rating\nfoo.com,left\nbar.com,mixed\n");
            FAIL("expected an error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":3") != std::string::npos);
        }
    }
    SUBCASE("malformed row") {
        CHECK_THROWS_AS(registry_from("domain,rating\njust-one-field\n"), DataError);
    }
    SUBCASE("missing header columns") {
        CHECK_THROWS_AS(registry_from("site,bias\nfoo.com,left\n"), DataError);
    }
    SUBCASE("columns may come in any order and CRLF endings") {
        const auto r = registry_from("rating,domain\r\nright,Foo.com\r\n");
        CHECK(r.lookup("foo.com") == Leaning::Right);
    }
    SUBCASE("far ratings keep the raw text") {
        const auto r = registry_from("domain,rating\na.com,far-left\nb.com,FAR-RIGHT\n");
        CHECK(r.find("a.com")->leaning == Leaning::Left);
        CHECK(r.find("a.com")->raw_rating == "far-left");
        CHECK(r.find("b.com")->leaning == Leaning::Right);
        CHECK(r.find("b.com")->raw_rating == "far-right");
    }
}

TEST_CASE("lookup with exact match and apex fallback") {
    const auto r = registry_from("domain,rating\nbreitbart.com,right\ncnn.com,left\nx.com,left\nmoney.cnn.com,center\n");
    CHECK(r.lookup("breitbart.com") == Leaning::Right);
    CHECK_FALSE(r.lookup("unknown.example").has_value());
    CHECK(r.lookup(normalize_domain("HTTP://WWW.X.COM")) == Leaning::Left);
    CHECK(r.lookup("edition.cnn.com") == Leaning::Left);
    CHECK(r.find("edition.cnn.com")->domain == "cnn.com");
    CHECK(r.lookup("money.cnn.com") == Leaning::Center);
}

TEST_CASE("missing registry file is a data error naming the path") {
    try {
        BiasRegistry::load("/nonexistent/registry.csv");
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/registry.csv") != std::string::npos);
    }
}

TEST_CASE("shipped snapshot counts") {
    const auto r = BiasRegistry::load(testing::snapshot_path());
    CHECK(r.count(Leaning::Left) == 158);
    CHECK(r.count(Leaning::Center) == 166);
    CHECK(r.count(Leaning::Right) == 98);
    CHECK(r.size() == 422);
    CHECK(r.count(Leaning::Left) + r.count(Leaning::Center) + r.count(Leaning::Right) == r.size());
    CHECK(r.lookup("nytimes.com") == Leaning::Left);
    CHECK(r.lookup("breitbart.com") == Leaning::Right);
    for (const auto& [domain, rec] : r.records()) {
        if (rec.raw_rating == "far-left") CHECK(rec.leaning == Leaning::Left);
        if (rec.raw_rating == "far-right") CHECK(rec.leaning == Leaning::Right);
    }
}

TEST_CASE("loading is deterministic") {
    const auto a = BiasRegistry::load(testing::snapshot_path());
    const auto b = BiasRegistry::load(testing::snapshot_path());
    REQUIRE(a.size() == b.size());
    auto ia = a.records().begin();
    for (const auto& [domain, rec] : b.records()) {
        CHECK(ia->first == domain);
        CHECK(ia->second.leaning == rec.leaning);
        ++ia;
    }
}
