#pragma once

// Binary checkpoints of a PerturbationState. All numbers little-endian.
//
//   offset  size  content
//   0       8     magic "EMHDCKPT"
//   8       4     u32 format version (1)
//   12      4     i32 nx
//   16      4     i32 ny
//   20      8     f64 lx
//   28      8     f64 ly
//   36      8     f64 mu1
//   44      8     f64 mu2
//   52      8     f64 time
//   60      4     u32 field count (2)
//   64      8     field order tags "psi\0" "b\0\0\0"
//   72      8     u64 payload size in bytes
//   80      ...   coefficients, field by field, row-major, (re, im) f64 pairs

#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "emhd/error.hpp"
#include "emhd/grid.hpp"
#include "emhd/io/atomic_file.hpp"
#include "emhd/model.hpp"

namespace emhd::io {

inline constexpr std::string_view kCheckpointMagic = "EMHDCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderSize = 80;

class CheckpointError : public IoError {
 public:
  using IoError::IoError;
};
class CorruptCheckpoint : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class TruncatedCheckpoint : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointVersionMismatch : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_le(std::string_view in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}
inline double get_f64(std::string_view in, std::size_t at) { return std::bit_cast<double>(get_le(in, at, 8)); }

constexpr std::array<char, 8> kFieldTags{'p', 's', 'i', '\0', 'b', '\0', '\0', '\0'};

}  // namespace detail

inline std::string checkpoint_encode(const PerturbationState& s) {
  require_same_grid(s.psi.grid(), s.b.grid(), "checkpoint");
  const Grid& g = s.grid();
  std::string out;
  out.reserve(kCheckpointHeaderSize + 32 * g.size());
  out.append(kCheckpointMagic);
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(g.nx));
  detail::put_u32(out, static_cast<std::uint32_t>(g.ny));
  detail::put_f64(out, g.lx);
  detail::put_f64(out, g.ly);
  detail::put_f64(out, s.params.mu1);
  detail::put_f64(out, s.params.mu2);
  detail::put_f64(out, s.time);
  detail::put_u32(out, 2);
  out.append(detail::kFieldTags.data(), detail::kFieldTags.size());
  detail::put_u64(out, 32ull * g.size());
  for (const SpectralField* f : {&s.psi, &s.b})
    for (const auto& c : f->coeffs()) {
      detail::put_f64(out, c.real());
      detail::put_f64(out, c.imag());
    }
  return out;
}

/// Decode a checkpoint. When `expected` is given, the stored grid must equal it.
inline PerturbationState checkpoint_decode(std::string_view in, const Grid* expected = nullptr) {
  if (in.size() < kCheckpointHeaderSize) {
    if (in.size() >= kCheckpointMagic.size() && in.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
      throw CorruptCheckpoint("checkpoint: bad magic");
    throw TruncatedCheckpoint("checkpoint: truncated header");
  }
  if (in.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) throw CorruptCheckpoint("checkpoint: bad magic");
  const auto version = static_cast<std::uint32_t>(detail::get_le(in, 8, 4));
  if (version != kCheckpointVersion)
    throw CheckpointVersionMismatch("checkpoint: version " + std::to_string(version) + ", expected " +
                                    std::to_string(kCheckpointVersion));
  const auto nx = static_cast<std::int32_t>(detail::get_le(in, 12, 4));
  const auto ny = static_cast<std::int32_t>(detail::get_le(in, 16, 4));
  const double lx = detail::get_f64(in, 20), ly = detail::get_f64(in, 28);
  ModelParams p{detail::get_f64(in, 36), detail::get_f64(in, 44)};
  const double time = detail::get_f64(in, 52);
  if (detail::get_le(in, 60, 4) != 2 || std::memcmp(in.data() + 64, detail::kFieldTags.data(), 8) != 0)
    throw CorruptCheckpoint("checkpoint: unexpected field layout");
  if (nx < 2 || ny < 2 || nx > (1 << 16) || ny > (1 << 16) || !(lx > 0.0) || !(ly > 0.0) || !std::isfinite(time))
    throw CorruptCheckpoint("checkpoint: invalid header values");
  try {
    p.validate();
  } catch (const InvalidArgument&) {
    throw CorruptCheckpoint("checkpoint: invalid model parameters");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(nx) * static_cast<std::uint64_t>(ny);
  const std::uint64_t payload = detail::get_le(in, 72, 8);
  if (payload != 32ull * cells) throw CorruptCheckpoint("checkpoint: payload size does not match grid");
  if (in.size() - kCheckpointHeaderSize < payload) throw TruncatedCheckpoint("checkpoint: truncated payload");
  if (in.size() - kCheckpointHeaderSize > payload) throw CorruptCheckpoint("checkpoint: trailing bytes");

  GridPtr g;
  try {
    g = make_grid(nx, ny, lx, ly);
  } catch (const InvalidArgument& e) {
    throw CorruptCheckpoint(std::string("checkpoint: ") + e.what());
  }
  if (expected) require_same_grid(*expected, *g, "checkpoint");
  PerturbationState s = PerturbationState::zero(g, p);
  s.time = time;
  std::size_t at = kCheckpointHeaderSize;
  for (SpectralField* f : {&s.psi, &s.b})
    for (auto& c : f->coeffs()) {
      c = cplx(detail::get_f64(in, at), detail::get_f64(in, at + 8));
      at += 16;
    }
  return s;
}

inline void checkpoint_write(const PerturbationState& s, const std::filesystem::path& path) {
  write_atomic(path, checkpoint_encode(s));
}

inline PerturbationState checkpoint_read(const std::filesystem::path& path, const Grid* expected = nullptr) {
  return checkpoint_decode(read_file(path), expected);
}

}  // namespace emhd::io
