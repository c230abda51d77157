#include "leanlab/error.hpp"
#include "leanlab/ingest.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace leanlab;
using testing::make_post;

TEST_CASE("read_corpus yields posts in file order") {
    testing::TempDir dir;
    testing::write_text(dir / "c.jsonl", R"({"id":"1","text":"first"}
{"id":"2","text":"second"}
{"id":"3","text":"third"}
)");
    const auto corpus = read_corpus(dir / "c.jsonl", {});
    REQUIRE(corpus.posts.size() == 3);
    CHECK(corpus.posts[0].id == "1");
    CHECK(corpus.posts[2].text == "third");
    CHECK(corpus.skipped == 0);
}

TEST_CASE("read_corpus skips malformed lines and counts them") {
    testing::TempDir dir;
    std::string text;
    for (int i = 0; i < 10; ++i) {
        text += i == 4 ? "{not json\n" : R"({"id":")" + std::to_string(i) + R"(","text":"post"})" + "\n";
    }
    testing::write_text(dir / "c.jsonl", text);
    const auto corpus = read_corpus(dir / "c.jsonl", {});
    CHECK(corpus.posts.size() == 9);
    CHECK(corpus.skipped == 1);
    CHECK(corpus.posts.size() + corpus.skipped == 10);
}

TEST_CASE("read_corpus rejects a mapping whose text field is absent") {
    testing::TempDir dir;
    testing::write_text(dir / "c.jsonl", R"({"id":"1","body":"x"}
{"id":"2","body":"y"}
)");
    CHECK_THROWS_AS(read_corpus(dir / "c.jsonl", {}), ConfigError);
    FieldMapping m;
    m.text_field = "body";
    CHECK(read_corpus(dir / "c.jsonl", m).posts.size() == 2);
}

TEST_CASE("read_corpus follows nested fields and url lists") {
    testing::TempDir dir;
    testing::write_text(dir / "c.jsonl",
                        R"({"post":{"id":7,"body":"hello there"},"links":["https://cnn.com/a"],"created":"2020-01-01"})"
                        "\n");
    FieldMapping m;
    m.id_field = "post.id";
    m.text_field = "post.body";
    m.url_field = "links";
    m.timestamp_field = "created";
    m.platform = Platform::Gab;
    const auto corpus = read_corpus(dir / "c.jsonl", m);
    REQUIRE(corpus.posts.size() == 1);
    const Post& p = corpus.posts[0];
    CHECK(p.id == "7");
    CHECK(p.text == "hello there");
    REQUIRE(p.urls.size() == 1);
    CHECK(p.urls[0] == "https://cnn.com/a");
    CHECK(p.timestamp == std::optional<std::string>("2020-01-01"));
    CHECK(p.platform == Platform::Gab);
}

TEST_CASE("missing corpus file") {
    CHECK_THROWS_AS(read_corpus("/nonexistent/c.jsonl", {}), DataError);
}

TEST_CASE("extract_urls scan rules") {
    CHECK(extract_urls("read https://a.com/x and http://b.org.") ==
          std::vector<std::string>{"https://a.com/x", "http://b.org"});
    CHECK(extract_urls("no links here").empty());
    CHECK(extract_urls("(https://a.com)") == std::vector<std::string>{"https://a.com"});
    CHECK(extract_urls("HTTPS://A.com/x, https://A.com/x!") == std::vector<std::string>{"HTTPS://A.com/x", "https://A.com/x"});
    CHECK(extract_urls("quoted \"https://q.com/p\" end") == std::vector<std::string>{"https://q.com/p"});
}

TEST_CASE("extract_urls never returns whitespace") {
    std::mt19937_64 rng(11);
    const std::string pieces[] = {"https://", "http://", "a.com", "/x", " ", "\t", "\n", ".", ")", "word", "\"", "("};
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        const int n = static_cast<int>(rng() % 12);
        for (int k = 0; k < n; ++k) text += pieces[rng() % std::size(pieces)];
        for (const auto& url : extract_urls(text)) {
            CHECK(url.find_first_of(" \t\n\r") == std::string::npos);
            CHECK(url.size() > 7);
        }
    }
}

TEST_CASE("post_domains") {
    const auto reg = testing::registry_from("domain,rating\nnytimes.com,left\nfoxnews.com,right\n");
    SUBCASE("same domain twice collapses") {
        const auto d = post_domains(make_post("1", "https://nytimes.com/a and https://www.nytimes.com/b"), reg);
        REQUIRE(d.size() == 1);
        CHECK(d[0] == PostDomain{"nytimes.com", Leaning::Left});
    }
    SUBCASE("no urls") { CHECK(post_domains(make_post("1", "nothing"), reg).empty()); }
    SUBCASE("known and unknown") {
        const auto d = post_domains(make_post("1", "https://nytimes.com/a https://blog.example/x"), reg);
        REQUIRE(d.size() == 2);
        CHECK(d[0].leaning == Leaning::Left);
        CHECK(d[1].domain == "blog.example");
        CHECK_FALSE(d[1].leaning.has_value());
    }
    SUBCASE("url field is merged after text urls") {
        const auto d = post_domains(make_post("1", "see https://foxnews.com/x", {"https://nytimes.com/y", "https://foxnews.com/z"}), reg);
        REQUIRE(d.size() == 2);
        CHECK(d[0].domain == "foxnews.com");
        CHECK(d[1].domain == "nytimes.com");
    }
    SUBCASE("apex fallback reports the registry key") {
        const auto d = post_domains(make_post("1", "https://edition.nytimes.com/a https://nytimes.com/b"), reg);
        REQUIRE(d.size() == 1);
        CHECK(d[0].domain == "nytimes.com");
    }
}

TEST_CASE("gab filter boundaries") {
    CHECK(passes_gab_filter(make_post("1", "one two three four five six https://a.com")));
    CHECK_FALSE(passes_gab_filter(make_post("1", "one two three four five https://a.com")));
    CHECK_FALSE(passes_gab_filter(make_post("1", "one two three four five six seven")));

    std::vector<Post> posts = {make_post("a", "one two three four five six https://a.com"),
                               make_post("b", "short https://a.com"),
                               make_post("c", "one two three four five six seven https://b.com")};
    const auto kept = filter_gab(posts);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "a");
    CHECK(kept[1].id == "c");
}

TEST_CASE("top_domains ordering") {
    CorpusStats s;
    s.domain_frequency = {{"a", 3}, {"b", 1}, {"c", 3}};
    CHECK(top_domains(s, 2) == std::vector<std::pair<std::string, std::size_t>>{{"a", 3}, {"c", 3}});
    CHECK(top_domains(s, 10).size() == 3);
    CHECK(top_domains(CorpusStats{}, 5).empty());
}

TEST_CASE("corpus_stats counts each domain once per post") {
    const auto reg = testing::registry_from("domain,rating\nnytimes.com,left\n");
    std::vector<Post> posts = {make_post("1", "https://nytimes.com/a https://nytimes.com/b https://x.example/"),
                               make_post("2", "https://nytimes.com/c")};
    const auto all = corpus_stats(posts);
    CHECK(all.post_count == 2);
    CHECK(all.domain_frequency.at("nytimes.com") == 2);
    CHECK(all.domain_frequency.at("x.example") == 1);
    const auto known = corpus_stats(posts, &reg);
    CHECK(known.domain_frequency.size() == 1);
}
