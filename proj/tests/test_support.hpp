#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace test_support {

inline std::filesystem::path data_dir() { return CORPUSKIT_TEST_DATA; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// Tab-separated rows, skipping blank lines and lines starting with '#'.
inline std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_file(p));
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') continue;
        rows.push_back(split(line, '\t'));
    }
    return rows;
}

}  // namespace test_support
