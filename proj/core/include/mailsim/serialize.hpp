#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mailsim/environment.hpp"
#include "mailsim/oracle.hpp"

namespace mailsim {

// Self-describing environment file: tree shape, node list, theta tables as
// flat row-major arrays (own arm most significant), noise model and seed.
nlohmann::json environment_to_json(const Environment& env,
                                   std::optional<std::uint64_t> seed = std::nullopt);
Environment environment_from_json(const nlohmann::json& j);

nlohmann::json oracle_to_json(const Environment& env, const OracleSolution& sol);

std::string read_text_file(const std::string& path);
// Writes to a temporary sibling and renames it over the target.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace mailsim
