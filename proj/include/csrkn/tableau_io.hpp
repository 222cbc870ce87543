#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "csrkn/tableau.hpp"

namespace csrkn {

inline constexpr std::string_view kTableauFormat = "rkn-tableau/1";

/// JSON object with keys format, label, s, c, a_bar (row-major rows), b_bar, b.
/// Every number is written in scientific notation with 17 significant digits.
[[nodiscard]] std::string tableau_to_json(const RknTableau& t);

/// Throws Error(Parse) on malformed input, unknown format or bad shapes.
[[nodiscard]] RknTableau tableau_from_json(std::string_view text);

/// Throws Error(Io) when the file cannot be written or read.
void save_tableau(const RknTableau& t, const std::filesystem::path& path);
[[nodiscard]] RknTableau load_tableau(const std::filesystem::path& path);

/// General format with 17 significant digits; locale independent.
[[nodiscard]] std::string format_double(double v);

} // namespace csrkn
