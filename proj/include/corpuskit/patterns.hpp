#pragma once

#include <string_view>

// Versioned pattern table for the content-statistics rules. Patterns use
// Perl syntax as accepted by Boost.Regex and are applied line by line; a match
// never spans a newline. Changing any entry requires bumping kPatternTableVersion.
namespace corpuskit::patterns {

inline constexpr std::string_view kPatternTableVersion = "2";

inline constexpr std::string_view kUrl =
    R"((?:https?|ftp)://[^\s<>"'`]+|www\.[A-Za-z0-9-]+\.[^\s<>"'`]+)";

inline constexpr std::string_view kIpv4 =
    R"((?<![\w.])(?:(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)\.){3}(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)(?![\w.]))";

// Full eight-group form, a compressed form with at least two leading groups, a
// single leading group followed by at least two groups (fe80::1:2), or a leading
// `::` form such as ::1. `a::b` (a C++ scope) is not an address.
inline constexpr std::string_view kIpv6 =
    R"((?<![\w:])(?:(?:[0-9A-Fa-f]{1,4}:){7}[0-9A-Fa-f]{1,4}|(?:[0-9A-Fa-f]{1,4}:){2,6}:(?:[0-9A-Fa-f]{1,4}(?::[0-9A-Fa-f]{1,4}){0,5})?|[0-9A-Fa-f]{1,4}::[0-9A-Fa-f]{1,4}(?::[0-9A-Fa-f]{1,4}){1,5}|::(?:[0-9A-Fa-f]{1,4}:){0,5}[0-9A-Fa-f]{1,4})(?![\w:]))";

inline constexpr std::string_view kEmail =
    R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})";

inline constexpr std::string_view kPhone =
    R"((?<![\w+])(?:\+\d{1,3}[ .-]?)?(?:\(\d{3}\)|\d{3})[ .-]\d{3}[ .-]\d{4}(?!\w))";

inline constexpr std::string_view kDateTime =
    R"((?<!\w)(?:\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:?\d{2})?)?|\d{1,2}/\d{1,2}/\d{2,4}|\d{1,2}:\d{2}:\d{2})(?!\w))";

inline constexpr std::string_view kMarkdownImage = R"(!\[[^\]\n]*\]\([^)\n]*\))";
inline constexpr std::string_view kHtmlImage = R"((?i)<img\b)";
inline constexpr std::string_view kMarkdownLink = R"((?<!!)\[[^\]\n]*\]\([^)\n]+\))";

}  // namespace corpuskit::patterns
