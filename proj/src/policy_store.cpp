#include "qcd/policy_store.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

namespace qcd {

namespace {

constexpr std::array<char, 8> kMagic{'Q', 'C', 'D', 'P', 'O', 'L', 'C', 'Y'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw PolicyFormatError("truncated policy file");
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::istream& in_;
};

}  // namespace

void write_policy(std::ostream& out, const SolvedInstance& solved) {
  const auto& vf = solved.value_function;
  const auto& policy = solved.policy;
  const SimplexGrid& grid = *vf.grid;
  const std::string config = canonical_json(solved.instance);

  Writer w(out);
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kPolicyFormatVersion);
  w.u32(static_cast<std::uint32_t>(grid.dimension()));
  w.u32(static_cast<std::uint32_t>(grid.resolution()));
  w.u64(instance_digest(solved.instance));
  w.u64(config.size());
  w.bytes(config.data(), config.size());
  w.u64(vf.iteration_count);
  w.f64(vf.certified_gap);
  w.f64(vf.final_delta);
  w.f64(policy.stop_tolerance);
  w.u64(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (const std::int32_t k : grid.composition(g)) w.u32(static_cast<std::uint32_t>(k));
    w.f64(vf.values[g]);
    w.u8(policy.verdicts[g]);
  }
  w.u64(policy.snapshots.size());
  for (const auto& snap : policy.snapshots) w.bytes(snap.data(), snap.size());
  if (!out) throw std::runtime_error("failed to write policy");
}

void write_policy(const std::filesystem::path& path, const SolvedInstance& solved) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  write_policy(out, solved);
}

SolvedInstance read_policy(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw PolicyFormatError("not a policy file (bad magic)");
  const auto version = r.u32();
  if (version != kPolicyFormatVersion) {
    throw PolicyFormatError(fmt::format("unsupported policy format version {}", version));
  }
  const std::size_t M = r.u32();
  const std::size_t G = r.u32();
  const auto digest = r.u64();
  const auto config_len = r.u64();
  if (config_len > (1u << 26)) throw PolicyFormatError("embedded instance is implausibly large");
  std::string config(config_len, '\0');
  r.bytes(config.data(), config.size());

  SolvedInstance solved;
  solved.instance = parse_instance(config);
  if (instance_digest(solved.instance) != digest) {
    throw PolicyFormatError("instance digest does not match the embedded instance");
  }
  if (solved.instance.model.M != M) throw PolicyFormatError("header M disagrees with instance");

  auto grid = std::make_shared<const SimplexGrid>(M, G);
  auto& vf = solved.value_function;
  auto& policy = solved.policy;
  vf.grid = grid;
  vf.h_bound = h_sup_bound(solved.instance.costs);
  vf.iteration_count = r.u64();
  vf.certified_gap = r.f64();
  vf.final_delta = r.f64();
  policy.stop_tolerance = r.f64();
  const auto points = r.u64();
  if (points != grid->size()) throw PolicyFormatError("point count disagrees with the grid");

  vf.values.resize(points);
  policy.grid = grid;
  policy.verdicts.resize(points);
  policy.stop_sets.assign(points, 0);
  std::vector<double> pi(M + 1);
  for (std::size_t g = 0; g < points; ++g) {
    const auto k = grid->composition(g);
    for (std::size_t i = 0; i <= M; ++i) {
      if (r.u32() != static_cast<std::uint32_t>(k[i])) {
        throw PolicyFormatError(fmt::format("record {} does not match the grid enumeration", g));
      }
    }
    vf.values[g] = r.f64();
    policy.verdicts[g] = r.u8();
    if (policy.verdicts[g] > M) throw PolicyFormatError(fmt::format("bad verdict in record {}", g));
    if (policy.verdicts[g]) {
      grid->coordinates(g, pi);
      policy.stop_sets[g] = tie_mask(pi, solved.instance.costs);
    }
  }
  const auto snapshots = r.u64();
  policy.snapshots.resize(snapshots);
  for (auto& snap : policy.snapshots) {
    snap.resize(points);
    r.bytes(snap.data(), snap.size());
  }
  vf.snapshots = policy.snapshots;
  policy.iteration_count = vf.iteration_count;
  policy.certified_gap = vf.certified_gap;
  return solved;
}

SolvedInstance read_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  return read_policy(in);
}

}  // namespace qcd
