#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel`; both must
// produce bit-identical results. The unqualified entry points pick one by
// problem size.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bdc/common.hpp"

namespace bdc::kernels {

// Edge `edge_id` belongs to sketch cell (bundle, level) with probability
// 2^-level, as a pure function of (seed, bundle, level, edge_id).
inline bool sketch_member(std::uint64_t seed, std::size_t bundle, std::size_t level,
                          std::uint64_t edge_id) {
  if (level == 0) return true;
  if (level >= 64) return false;
  return (prf(seed, bundle, level, edge_id) >> (64 - level)) == 0;
}

namespace serial {

void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src);

// XORs `edge_id` into every cell of a bundles x levels sketch (row-major by
// bundle) whose sampling includes the edge.
void sketch_accumulate(std::span<std::uint64_t> cells, std::uint64_t seed,
                       std::size_t bundles, std::size_t levels, std::uint64_t edge_id);

// Sorted distinct nonzero values.
std::vector<std::uint64_t> nonzero_values(std::span<const std::uint64_t> cells);

// Per-vertex uniform draws over incident multi-edge slots. `offsets` is a CSR
// index into `slots` (slot = edge index, repeated by multiplicity). Vertex v
// makes `draws[v]` draws; marks[e] is set to 1 for every edge drawn.
void sample_incident(std::span<const std::size_t> offsets, std::span<const std::uint32_t> slots,
                     std::span<const std::uint64_t> draws, std::uint64_t seed,
                     std::span<std::uint8_t> marks);

}  // namespace serial

namespace parallel {

void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src);
void sketch_accumulate(std::span<std::uint64_t> cells, std::uint64_t seed,
                       std::size_t bundles, std::size_t levels, std::uint64_t edge_id);
std::vector<std::uint64_t> nonzero_values(std::span<const std::uint64_t> cells);
void sample_incident(std::span<const std::size_t> offsets, std::span<const std::uint32_t> slots,
                     std::span<const std::uint64_t> draws, std::uint64_t seed,
                     std::span<std::uint8_t> marks);

}  // namespace parallel

inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 16;

inline void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  if (dst.size() >= kParallelThreshold) {
    parallel::xor_into(dst, src);
  } else {
    serial::xor_into(dst, src);
  }
}

inline void sketch_accumulate(std::span<std::uint64_t> cells, std::uint64_t seed,
                              std::size_t bundles, std::size_t levels, std::uint64_t edge_id) {
  if (cells.size() >= kParallelThreshold) {
    parallel::sketch_accumulate(cells, seed, bundles, levels, edge_id);
  } else {
    serial::sketch_accumulate(cells, seed, bundles, levels, edge_id);
  }
}

inline std::vector<std::uint64_t> nonzero_values(std::span<const std::uint64_t> cells) {
  return cells.size() >= kParallelThreshold ? parallel::nonzero_values(cells)
                                            : serial::nonzero_values(cells);
}

inline void sample_incident(std::span<const std::size_t> offsets, std::span<const std::uint32_t> slots,
                            std::span<const std::uint64_t> draws, std::uint64_t seed,
                            std::span<std::uint8_t> marks) {
  if (offsets.size() >= kParallelThreshold) {
    parallel::sample_incident(offsets, slots, draws, seed, marks);
  } else {
    serial::sample_incident(offsets, slots, draws, seed, marks);
  }
}

}  // namespace bdc::kernels
