#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace corpuskit::utf8 {

struct RepairResult {
    std::string text;
    std::size_t replacements = 0;
};

/// Replaces every maximal invalid subsequence with U+FFFD.
RepairResult repair(std::string_view bytes);

bool is_valid(std::string_view bytes);

/// Number of code points, counting each lead byte once.
std::size_t length(std::string_view text);

/// Decodes the code point starting at `pos` and advances `pos`. Input must be valid UTF-8.
char32_t next(std::string_view text, std::size_t& pos);

}  // namespace corpuskit::utf8
