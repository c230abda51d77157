#pragma once

#include "leanlab/leaning.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace leanlab {

struct NewsDomainRecord {
    std::string domain;     // normalized hostname
    Leaning leaning;
    std::string raw_rating; // rating text as it appeared in the source, lowercased
};

/// Strips scheme, userinfo, path, query, fragment, port and any leading
/// "www." labels; lowercases. Throws DataError when no host can be found.
std::string normalize_domain(std::string_view raw);

/// Registrable apex of a normalized host: the last two labels, or three when
/// the host ends in a known two-part public suffix such as "co.uk".
std::string registrable_apex(std::string_view host);

/// Maps a rating string (far-left, left, center, right, far-right) to a leaning.
std::optional<Leaning> rating_to_leaning(std::string_view rating);

/// Immutable domain -> leaning table loaded from a `domain,rating` CSV.
class BiasRegistry {
public:
    BiasRegistry() = default;

    static BiasRegistry load(const std::filesystem::path& path);
    static BiasRegistry parse(std::istream& in, std::string_view source_name = "<stream>");

    /// Exact match on the normalized domain, then a fallback on its apex.
    std::optional<Leaning> lookup(std::string_view domain) const;

    /// Like lookup() but returns the record that matched.
    const NewsDomainRecord* find(std::string_view domain) const;

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    std::size_t count(Leaning l) const { return counts_[class_index(l)]; }
    const std::map<std::string, NewsDomainRecord, std::less<>>& records() const {
        return records_;
    }

private:
    void insert(NewsDomainRecord record, std::size_t line_no, std::string_view source);

    std::map<std::string, NewsDomainRecord, std::less<>> records_;
    std::array<std::size_t, 3> counts_{};
};

} // namespace leanlab
