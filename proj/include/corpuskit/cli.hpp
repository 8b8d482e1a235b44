#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace corpuskit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct StageReport {
    std::string name;
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<std::string, std::size_t> rejected;  // rule → count

    std::size_t rejected_total() const;
};

struct RunReport {
    std::string subcommand;
    std::vector<StageReport> stages;
    std::size_t malformed_lines = 0;
    std::string config_digest;
    double wall_time_ms = 0.0;
    std::string status = "ok";
    std::string error;

    /// Serialized object; `include_wall_time=false` gives a byte-stable form.
    std::string to_json(bool include_wall_time = true) const;
};

/// Runs the toolkit with argv-style arguments (without the program name).
/// Records are read from `in` unless `--input` is given and written to `out`
/// unless `--output` is given. Diagnostics and help go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace corpuskit::cli
