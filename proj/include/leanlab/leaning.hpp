#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace leanlab {

/// Three-way political orientation. The numeric codes are part of the
/// labeling arithmetic and must not change.
enum class Leaning : int { Left = -1, Center = 0, Right = 1 };

/// Fixed class order used for matrices, tie-breaking and reports.
inline constexpr std::array<Leaning, 3> kLeaningOrder = {Leaning::Left, Leaning::Center,
                                                         Leaning::Right};

constexpr int code(Leaning l) { return static_cast<int>(l); }

/// Position of the class in kLeaningOrder (0, 1, 2).
constexpr std::size_t class_index(Leaning l) { return static_cast<std::size_t>(code(l) + 1); }

constexpr Leaning leaning_from_index(std::size_t i) { return kLeaningOrder.at(i); }

constexpr Leaning opposite(Leaning l) {
    switch (l) {
    case Leaning::Left: return Leaning::Right;
    case Leaning::Right: return Leaning::Left;
    default: return Leaning::Center;
    }
}

std::string_view to_string(Leaning l);

/// Accepts "left"/"center"/"right" (any case) and single letters L/C/R.
std::optional<Leaning> parse_leaning(std::string_view text);

} // namespace leanlab
