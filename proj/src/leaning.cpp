#include "leanlab/leaning.hpp"

#include "strings.hpp"

namespace leanlab {

std::string_view to_string(Leaning l) {
    switch (l) {
    case Leaning::Left: return "left";
    case Leaning::Center: return "center";
    case Leaning::Right: return "right";
    }
    return "center";
}

std::optional<Leaning> parse_leaning(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "left" || t == "l" || t == "-1") return Leaning::Left;
    if (t == "center" || t == "centre" || t == "c" || t == "0") return Leaning::Center;
    if (t == "right" || t == "r" || t == "1" || t == "+1") return Leaning::Right;
    return std::nullopt;
}

} // namespace leanlab
