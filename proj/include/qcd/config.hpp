#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qcd/model.hpp"

namespace qcd {

/// Schema tag written into and required from every instance file.
inline constexpr std::string_view kInstanceSchema = "qcd-instance/v1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instance {
  std::string name;
  ModelSpec model;
  CostSpec costs;
};

/// Parses a JSON instance:
///
///   {
///     "schema": "qcd-instance/v1",
///     "name": "fig2d1a",
///     "alphabet_size": 4,
///     "M": 2,
///     "p0": "1/50",  "p": 0.05,
///     "nu": [0.5, 0.5],
///     "f": [[...], [...], [...]],          // M+1 rows of alphabet_size entries
///     "c": 1,
///     "a": [[10, 10], [0, 3], [3, 0]]      // M+1 rows, column j-1 is decision j
///   }
///
/// Every real may be a JSON number, a decimal string, or a fraction string
/// "n/d". Parsing never depends on the locale. Shape errors throw
/// ConfigError; value invariants are left to validate().
Instance parse_instance(std::string_view json_text);
Instance load_instance(const std::filesystem::path& path);

/// Pretty-printed instance; numbers use the shortest round-trip form.
std::string to_json(const Instance& instance);

/// Compact form with sorted keys; the input to instance_digest().
std::string canonical_json(const Instance& instance);

/// 64-bit FNV-1a of canonical_json().
std::uint64_t instance_digest(const Instance& instance);

}  // namespace qcd
