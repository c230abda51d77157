#include "leanlab/ingest.hpp"

#include "leanlab/error.hpp"
#include "strings.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace leanlab {

using nlohmann::json;

std::string_view to_string(Platform p) {
    switch (p) {
    case Platform::Twitter: return "twitter";
    case Platform::Gab: return "gab";
    case Platform::Other: return "other";
    }
    return "other";
}

std::optional<Platform> parse_platform(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "twitter") return Platform::Twitter;
    if (t == "gab") return Platform::Gab;
    if (t == "other") return Platform::Other;
    return std::nullopt;
}

namespace {

const json* find_field(const json& obj, std::string_view dotted) {
    const json* cur = &obj;
    while (!dotted.empty()) {
        const auto dot = dotted.find('.');
        const std::string key(dotted.substr(0, dot));
        if (!cur->is_object()) return nullptr;
        auto it = cur->find(key);
        if (it == cur->end()) return nullptr;
        cur = &*it;
        dotted = dot == std::string_view::npos ? std::string_view{} : dotted.substr(dot + 1);
    }
    return cur;
}

std::optional<std::string> scalar_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    return std::nullopt;
}

std::optional<Post> parse_post(const std::string& line, const FieldMapping& m) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) return std::nullopt;

    Post post;
    post.platform = m.platform;

    const json* id = find_field(obj, m.id_field);
    if (!id) return std::nullopt;
    auto id_str = scalar_string(*id);
    if (!id_str || id_str->empty()) return std::nullopt;
    post.id = std::move(*id_str);

    if (const json* text = find_field(obj, m.text_field)) {
        if (text->is_string()) post.text = text->get<std::string>();
        else if (!text->is_null()) return std::nullopt;
    }
    if (!m.url_field.empty()) {
        if (const json* urls = find_field(obj, m.url_field)) {
            if (urls->is_string()) {
                post.urls.push_back(urls->get<std::string>());
            } else if (urls->is_array()) {
                for (const auto& u : *urls) {
                    if (u.is_string()) post.urls.push_back(u.get<std::string>());
                }
            }
        }
    }
    if (!m.timestamp_field.empty()) {
        if (const json* ts = find_field(obj, m.timestamp_field); ts && ts->is_string()) {
            post.timestamp = ts->get<std::string>();
        }
    }
    if (post.text.empty() && post.urls.empty()) return std::nullopt;
    return post;
}

void check_mapping(const std::filesystem::path& path, const FieldMapping& m) {
    std::ifstream in(path);
    std::string line;
    std::size_t seen = 0;
    std::size_t missing_id = 0;
    std::size_t missing_text = 0;
    while (seen < 100 && std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++seen;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        if (!find_field(obj, m.id_field)) ++missing_id;
        if (!find_field(obj, m.text_field)) ++missing_text;
    }
    auto fail = [&](const std::string& field, std::size_t missing) {
        throw ConfigError("field '" + field + "' is absent in " + std::to_string(missing) + " of the first " +
                          std::to_string(seen) + " lines of '" + path.string() +
                          "'; check the field mapping");
    };
    if (missing_id * 2 > seen) fail(m.id_field, missing_id);
    if (missing_text * 2 > seen) fail(m.text_field, missing_text);
}

constexpr std::string_view kUrlTerminators = ")]}>\"'<";
constexpr std::string_view kTrailingPunct = ".,;:!?)\"'";

struct UrlSpan {
    std::size_t begin;
    std::size_t end; // one past the trimmed URL
    std::size_t raw_end;
};

std::vector<UrlSpan> find_url_spans(std::string_view text) {
    std::vector<UrlSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t prefix = 0;
        if (detail::starts_with_icase(text.substr(i), "https://")) prefix = 8;
        else if (detail::starts_with_icase(text.substr(i), "http://")) prefix = 7;
        if (prefix == 0) {
            ++i;
            continue;
        }
        std::size_t end = i + prefix;
        while (end < text.size() && !detail::is_space(text[end]) &&
               kUrlTerminators.find(text[end]) == std::string_view::npos) {
            ++end;
        }
        const std::size_t raw_end = end;
        while (end > i + prefix && kTrailingPunct.find(text[end - 1]) != std::string_view::npos) --end;
        if (end > i + prefix) spans.push_back({i, end, raw_end});
        i = raw_end;
    }
    return spans;
}

} // namespace

CorpusReader::CorpusReader(const std::filesystem::path& path, FieldMapping mapping)
    : mapping_(std::move(mapping)) {
    if (!std::filesystem::exists(path)) throw DataError("corpus file '" + path.string() + "' does not exist");
    check_mapping(path, mapping_);
    in_.open(path);
    if (!in_) throw DataError("cannot open corpus file '" + path.string() + "'");
}

std::optional<Post> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++lines_read_;
        detail::strip_cr(line);
        if (auto post = parse_post(line, mapping_)) return post;
        ++skipped_;
    }
    return std::nullopt;
}

Corpus read_corpus(const std::filesystem::path& path, const FieldMapping& mapping) {
    CorpusReader reader(path, mapping);
    Corpus corpus;
    while (auto post = reader.next()) corpus.posts.push_back(std::move(*post));
    corpus.skipped = reader.skipped();
    return corpus;
}

std::vector<std::string> extract_urls(std::string_view text) {
    std::vector<std::string> urls;
    for (const auto& span : find_url_spans(text)) {
        urls.emplace_back(text.substr(span.begin, span.end - span.begin));
    }
    return urls;
}

std::string strip_urls(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    for (const auto& span : find_url_spans(text)) {
        out.append(text.substr(pos, span.begin - pos));
        out.push_back(' ');
        pos = span.end;
    }
    out.append(text.substr(pos));
    return out;
}

namespace {

template <typename Fn>
void for_each_post_url(const Post& post, Fn&& fn) {
    for (const auto& u : extract_urls(post.text)) fn(u);
    for (const auto& u : post.urls) fn(u);
}

} // namespace

std::vector<PostDomain> post_domains(const Post& post, const BiasRegistry& registry) {
    std::vector<PostDomain> out;
    std::set<std::string, std::less<>> seen;
    for_each_post_url(post, [&](const std::string& url) {
        std::string domain;
        try {
            domain = normalize_domain(url);
        } catch (const DataError&) {
            return;
        }
        std::optional<Leaning> leaning;
        if (const auto* rec = registry.find(domain)) {
            domain = rec->domain;
            leaning = rec->leaning;
        }
        if (seen.insert(domain).second) out.push_back({std::move(domain), leaning});
    });
    return out;
}

bool passes_gab_filter(const Post& post) {
    bool has_url = !post.urls.empty() || !find_url_spans(post.text).empty();
    if (!has_url) return false;
    std::istringstream words(strip_urls(post.text));
    std::string w;
    std::size_t n = 0;
    while (words >> w) {
        if (++n > 5) return true;
    }
    return false;
}

std::vector<Post> filter_gab(std::vector<Post> posts) {
    std::erase_if(posts, [](const Post& p) { return !passes_gab_filter(p); });
    return posts;
}

CorpusStats corpus_stats(const std::vector<Post>& posts, const BiasRegistry* registry) {
    CorpusStats stats;
    stats.post_count = posts.size();
    static const BiasRegistry kEmpty;
    for (const auto& post : posts) {
        for (const auto& d : post_domains(post, registry ? *registry : kEmpty)) {
            if (registry && !d.leaning) continue;
            ++stats.domain_frequency[d.domain];
        }
    }
    return stats;
}

std::vector<std::pair<std::string, std::size_t>> top_domains(const CorpusStats& stats, std::size_t k) {
    std::vector<std::pair<std::string, std::size_t>> items(stats.domain_frequency.begin(),
                                                           stats.domain_frequency.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (items.size() > k) items.resize(k);
    return items;
}

} // namespace leanlab
