#include "corpuskit/utf8.hpp"

namespace corpuskit::utf8 {

namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

struct Lead {
    std::size_t trailing = 0;  // continuation bytes required
    unsigned char lo = 0x80;   // bounds of the first continuation byte
    unsigned char hi = 0xBF;
    bool ok = false;
};

Lead lead_info(unsigned char b0) {
    if (b0 >= 0xC2 && b0 <= 0xDF) return {1, 0x80, 0xBF, true};
    if (b0 == 0xE0) return {2, 0xA0, 0xBF, true};
    if ((b0 >= 0xE1 && b0 <= 0xEC) || b0 == 0xEE || b0 == 0xEF) return {2, 0x80, 0xBF, true};
    if (b0 == 0xED) return {2, 0x80, 0x9F, true};
    if (b0 == 0xF0) return {3, 0x90, 0xBF, true};
    if (b0 >= 0xF1 && b0 <= 0xF3) return {3, 0x80, 0xBF, true};
    if (b0 == 0xF4) return {3, 0x80, 0x8F, true};
    return {};
}

// Number of well-formed bytes after the lead, stopping at the first bad one.
std::size_t matched_trailing(std::string_view s, std::size_t pos, const Lead& lead) {
    std::size_t i = 1;
    for (; i <= lead.trailing && pos + i < s.size(); ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        const bool ok = (i == 1) ? (b >= lead.lo && b <= lead.hi) : (b >= 0x80 && b <= 0xBF);
        if (!ok) break;
    }
    return i - 1;
}

// Length of the valid sequence starting at `pos`, or 0 if the bytes there are invalid.
std::size_t valid_sequence(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return 1;
    const Lead lead = lead_info(b0);
    if (!lead.ok) return 0;
    return matched_trailing(s, pos, lead) == lead.trailing ? lead.trailing + 1 : 0;
}

// Bytes consumed by one replacement: a truncated but otherwise well-formed
// prefix counts as a single error (maximal subpart).
std::size_t invalid_span(std::string_view s, std::size_t pos) {
    const Lead lead = lead_info(static_cast<unsigned char>(s[pos]));
    if (!lead.ok) return 1;
    return 1 + matched_trailing(s, pos, lead);
}

}  // namespace

RepairResult repair(std::string_view bytes) {
    RepairResult result;
    result.text.reserve(bytes.size());
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (const std::size_t n = valid_sequence(bytes, pos); n > 0) {
            result.text.append(bytes.substr(pos, n));
            pos += n;
        } else {
            result.text.append(kReplacement);
            ++result.replacements;
            pos += invalid_span(bytes, pos);
        }
    }
    return result;
}

bool is_valid(std::string_view bytes) {
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t n = valid_sequence(bytes, pos);
        if (n == 0) return false;
        pos += n;
    }
    return true;
}

std::size_t length(std::string_view text) {
    std::size_t n = 0;
    for (const char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

char32_t next(std::string_view text, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    std::size_t extra = b0 >= 0xF0 ? 3 : b0 >= 0xE0 ? 2 : 1;
    char32_t cp = b0 & (0x3F >> extra);
    ++pos;
    for (; extra > 0 && pos < text.size(); --extra, ++pos) {
        cp = (cp << 6) | (static_cast<unsigned char>(text[pos]) & 0x3F);
    }
    return cp;
}

}  // namespace corpuskit::utf8
