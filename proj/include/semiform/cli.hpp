#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace semiform {

// Exit codes: 0 success, 1 negative verdict, 2 usage or input error.
enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitError = 2 };

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Seed used when --seed is absent: SEMIFORM_SEED if set and numeric,
// kDefaultSeed otherwise.
std::uint64_t default_seed();

// `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Indented "key: value" rendering of a report.
std::string render_text(const nlohmann::ordered_json& report);

}  // namespace semiform
