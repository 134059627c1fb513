#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qmeas::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitAnomaly = 3;
inline constexpr int kExitIo = 4;

struct Invocation {
    std::string experiment;
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<std::string> output_path;
    // subquantum shortcuts; override the config when given
    std::optional<std::string> model;
    std::optional<std::string> angles;  // "a1,b1,a2,b2" in radians
};

/// Resolves the config, runs the experiment, writes the report and manifest.
/// Returns one of the kExit* codes; failures are described on stderr.
int run(const Invocation& invocation);

}  // namespace qmeas::cli
