#pragma once

#include "leanlab/bias_registry.hpp"
#include "leanlab/leaning.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace leanlab {

enum class Platform { Twitter, Gab, Other };

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view text);

struct Post {
    std::string id;
    std::string text;
    std::vector<std::string> urls; // raw URLs carried alongside the text
    Platform platform = Platform::Other;
    std::optional<std::string> timestamp;
};

/// Names of the JSON fields holding each Post attribute. Dotted names address
/// nested objects ("user.id"). An empty url_field means URLs come from text only.
struct FieldMapping {
    std::string id_field = "id";
    std::string text_field = "text";
    std::string url_field;
    std::string timestamp_field;
    Platform platform = Platform::Other;
};

/// Streams Posts from a JSON-lines file. Lines that are not valid posts are
/// skipped and counted. Construction pre-scans the first 100 lines and throws
/// ConfigError when a mandatory mapped field is missing from more than half.
class CorpusReader {
public:
    CorpusReader(const std::filesystem::path& path, FieldMapping mapping);

    std::optional<Post> next();

    std::size_t lines_read() const { return lines_read_; }
    std::size_t skipped() const { return skipped_; }

private:
    std::ifstream in_;
    FieldMapping mapping_;
    std::size_t lines_read_ = 0;
    std::size_t skipped_ = 0;
};

struct Corpus {
    std::vector<Post> posts;
    std::size_t skipped = 0;
};

Corpus read_corpus(const std::filesystem::path& path, const FieldMapping& mapping);

/// http(s) URLs in order of appearance, duplicates kept, trailing
/// punctuation trimmed.
std::vector<std::string> extract_urls(std::string_view text);

/// Text with every extracted URL span removed.
std::string strip_urls(std::string_view text);

struct PostDomain {
    std::string domain;
    std::optional<Leaning> leaning;

    bool operator==(const PostDomain&) const = default;
};

/// Unique domains linked by a post (text URLs first, then the urls field),
/// each looked up in the registry. A domain that matched a registry record
/// through the apex fallback is reported under the registry key.
std::vector<PostDomain> post_domains(const Post& post, const BiasRegistry& registry);

/// Keeps posts whose URL-free text has more than five whitespace tokens and
/// that carry at least one URL.
bool passes_gab_filter(const Post& post);
std::vector<Post> filter_gab(std::vector<Post> posts);

struct CorpusStats {
    std::size_t post_count = 0;
    std::map<std::string, std::size_t> domain_frequency;
};

/// Counts each post's unique domains. With a registry, only domains it knows are counted.
CorpusStats corpus_stats(const std::vector<Post>& posts, const BiasRegistry* registry = nullptr);

std::vector<std::pair<std::string, std::size_t>> top_domains(const CorpusStats& stats,
                                                             std::size_t k);

} // namespace leanlab
