#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "qcd/config.hpp"
#include "qcd/solver.hpp"

namespace qcd {

inline constexpr std::uint32_t kPolicyFormatVersion = 1;

class PolicyFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solved instance: what `solve` writes and every later command reads.
struct SolvedInstance {
  Instance instance;
  ValueFunction value_function;
  Policy policy;
};

/// Binary layout, all integers little-endian, reals IEEE-754 binary64:
///
///   char[8]  magic "QCDPOLCY"
///   u32      format version
///   u32      M
///   u32      G
///   u64      instance digest (FNV-1a of the canonical instance JSON)
///   u64      byte length L, then L bytes of canonical instance JSON
///   u64      iteration count N
///   f64      certified gap, f64 final sup-norm delta, f64 stop tolerance
///   u64      point count P, then P records of
///              u32 k_0 .. k_M, f64 value, u8 verdict (0 continue, j stop j)
///   u64      snapshot count S, then S blocks of P verdict bytes (Gamma_0..)
void write_policy(std::ostream& out, const SolvedInstance& solved);
void write_policy(const std::filesystem::path& path, const SolvedInstance& solved);

/// Rebuilds the grid and checks the digest and every record's composition.
SolvedInstance read_policy(std::istream& in);
SolvedInstance read_policy(const std::filesystem::path& path);

}  // namespace qcd
