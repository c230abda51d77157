#include "leanlab/bias_registry.hpp"

#include "leanlab/error.hpp"
#include "strings.hpp"

#include <array>
#include <fstream>
#include <vector>

namespace leanlab {

namespace {

bool valid_host_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool valid_host(std::string_view host) {
    if (host.empty() || host.find('.') == std::string_view::npos) return false;
    if (host.front() == '.' || host.back() == '.') return false;
    if (host.find("..") != std::string_view::npos) return false;
    for (char c : host) {
        if (!valid_host_char(c)) return false;
    }
    return true;
}

// Two-label public suffixes common among news outlets. Not a full PSL.
constexpr std::array<std::string_view, 16> kTwoPartSuffixes = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "com.au", "net.au", "org.au", "co.nz",
    "co.jp", "co.in", "com.br", "co.za", "com.mx", "com.sg", "com.hk", "co.il"};

} // namespace

std::string normalize_domain(std::string_view raw) {
    std::string_view s = detail::trim(raw);
    if (s.empty()) throw DataError("cannot normalize empty domain");

    if (auto scheme = s.find("://"); scheme != std::string_view::npos) {
        s.remove_prefix(scheme + 3);
    } else if (detail::starts_with_icase(s, "//")) {
        s.remove_prefix(2);
    }
    if (auto end = s.find_first_of("/?#"); end != std::string_view::npos) s = s.substr(0, end);
    if (auto at = s.rfind('@'); at != std::string_view::npos) s.remove_prefix(at + 1);
    if (auto colon = s.find(':'); colon != std::string_view::npos) s = s.substr(0, colon);

    std::string host = detail::to_lower(s);
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (!valid_host(host)) throw DataError("no host component in '" + std::string(raw) + "'");

    while (host.rfind("www.", 0) == 0 && host.find('.', 4) != std::string::npos) {
        host.erase(0, 4);
    }
    return host;
}

std::string registrable_apex(std::string_view host) {
    std::vector<std::size_t> dots;
    for (std::size_t i = 0; i < host.size(); ++i) {
        if (host[i] == '.') dots.push_back(i);
    }
    if (dots.size() < 2) return std::string(host);
    std::size_t keep = 2;
    std::string_view last_two = host.substr(dots[dots.size() - 2] + 1);
    for (auto suffix : kTwoPartSuffixes) {
        if (last_two == suffix) {
            keep = 3;
            break;
        }
    }
    if (dots.size() < keep) return std::string(host);
    return std::string(host.substr(dots[dots.size() - keep] + 1));
}

std::optional<Leaning> rating_to_leaning(std::string_view rating) {
    const std::string r = detail::to_lower(detail::trim(rating));
    if (r == "far-left" || r == "left") return Leaning::Left;
    if (r == "center") return Leaning::Center;
    if (r == "right" || r == "far-right") return Leaning::Right;
    return std::nullopt;
}

BiasRegistry BiasRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open registry file '" + path.string() + "'");
    return parse(in, path.string());
}

BiasRegistry BiasRegistry::parse(std::istream& in, std::string_view source_name) {
    BiasRegistry registry;
    const std::string source(source_name);
    std::string line;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    int domain_col = -1;
    int rating_col = -1;

    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        if (!detail::split_csv_line(line, fields)) {
            throw DataError(source + ":" + std::to_string(line_no) + ": unterminated quote");
        }
        if (domain_col < 0) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string name = detail::to_lower(detail::trim(fields[i]));
                if (name == "domain") domain_col = static_cast<int>(i);
                if (name == "rating") rating_col = static_cast<int>(i);
            }
            if (domain_col < 0 || rating_col < 0) {
                throw DataError(source + ":" + std::to_string(line_no) +
                                ": header must name 'domain' and 'rating' columns");
            }
            continue;
        }
        const auto needed = static_cast<std::size_t>(std::max(domain_col, rating_col));
        if (fields.size() <= needed) {
            throw DataError(source + ":" + std::to_string(line_no) + ": malformed row, expected " +
                            std::to_string(needed + 1) + " columns");
        }
        const std::string_view raw_domain = detail::trim(fields[domain_col]);
        const std::string_view raw_rating = detail::trim(fields[rating_col]);
        if (raw_domain.empty()) {
            throw DataError(source + ":" + std::to_string(line_no) + ": malformed row, empty domain");
        }
        auto leaning = rating_to_leaning(raw_rating);
        if (!leaning) {
            throw DataError(source + ":" + std::to_string(line_no) + ": unknown rating '" +
                            std::string(raw_rating) + "'");
        }
        std::string domain;
        try {
            domain = normalize_domain(raw_domain);
        } catch (const DataError& e) {
            throw DataError(source + ":" + std::to_string(line_no) + ": malformed row, " + e.what());
        }
        registry.insert({std::move(domain), *leaning, detail::to_lower(raw_rating)}, line_no,
                        source);
    }
    return registry;
}

void BiasRegistry::insert(NewsDomainRecord record, std::size_t line_no, std::string_view source) {
    const Leaning l = record.leaning;
    auto [it, inserted] = records_.emplace(record.domain, std::move(record));
    if (!inserted) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": duplicate domain '" +
                        it->first + "'");
    }
    ++counts_[class_index(l)];
}

const NewsDomainRecord* BiasRegistry::find(std::string_view domain) const {
    if (auto it = records_.find(domain); it != records_.end()) return &it->second;
    const std::string apex = registrable_apex(domain);
    if (apex != domain) {
        if (auto it = records_.find(apex); it != records_.end()) return &it->second;
    }
    return nullptr;
}

std::optional<Leaning> BiasRegistry::lookup(std::string_view domain) const {
    if (const auto* rec = find(domain)) return rec->leaning;
    return std::nullopt;
}

} // namespace leanlab
