#include "bdc/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <random>

#ifdef BDC_HAVE_OPENMP
#include <omp.h>
#endif

namespace bdc::kernels {

namespace {

// Draws for one vertex. Stops early once every incident slot has been hit;
// later draws cannot change the marked set, so the outcome is unchanged.
template <typename Mark>
void sample_one(std::size_t v, std::span<const std::size_t> offsets,
                std::span<const std::uint32_t> slots, std::span<const std::uint64_t> draws,
                std::uint64_t seed, Mark&& mark) {
  const std::size_t begin = offsets[v];
  const std::size_t deg = offsets[v + 1] - begin;
  if (deg == 0 || draws[v] == 0) return;
  SplitMix64 rng(prf(seed, v));
  std::uniform_int_distribution<std::size_t> pick(0, deg - 1);
  std::vector<std::uint8_t> hit(deg, 0);
  std::size_t distinct = 0;
  for (std::uint64_t i = 0; i < draws[v] && distinct < deg; ++i) {
    const std::size_t s = pick(rng);
    if (!hit[s]) {
      hit[s] = 1;
      ++distinct;
      mark(slots[begin + s]);
    }
  }
}

}  // namespace

namespace serial {

void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  const std::size_t n = std::min(dst.size(), src.size());
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

void sketch_accumulate(std::span<std::uint64_t> cells, std::uint64_t seed,
                       std::size_t bundles, std::size_t levels, std::uint64_t edge_id) {
  for (std::size_t b = 0; b < bundles; ++b) {
    for (std::size_t j = 0; j < levels; ++j) {
      if (sketch_member(seed, b, j, edge_id)) cells[b * levels + j] ^= edge_id;
    }
  }
}

std::vector<std::uint64_t> nonzero_values(std::span<const std::uint64_t> cells) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c : cells) {
    if (c != 0) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void sample_incident(std::span<const std::size_t> offsets, std::span<const std::uint32_t> slots,
                     std::span<const std::uint64_t> draws, std::uint64_t seed,
                     std::span<std::uint8_t> marks) {
  const std::size_t n = offsets.empty() ? 0 : offsets.size() - 1;
  for (std::size_t v = 0; v < n; ++v) {
    sample_one(v, offsets, slots, draws, seed, [&](std::uint32_t e) { marks[e] = 1; });
  }
}

}  // namespace serial

namespace parallel {

void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  const auto n = static_cast<std::int64_t>(std::min(dst.size(), src.size()));
  std::uint64_t* d = dst.data();
  const std::uint64_t* s = src.data();
#ifdef BDC_HAVE_OPENMP
#pragma omp parallel for simd schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) d[i] ^= s[i];
}

void sketch_accumulate(std::span<std::uint64_t> cells, std::uint64_t seed,
                       std::size_t bundles, std::size_t levels, std::uint64_t edge_id) {
  const auto nb = static_cast<std::int64_t>(bundles);
#ifdef BDC_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t b = 0; b < nb; ++b) {
    for (std::size_t j = 0; j < levels; ++j) {
      if (sketch_member(seed, static_cast<std::size_t>(b), j, edge_id)) {
        cells[static_cast<std::size_t>(b) * levels + j] ^= edge_id;
      }
    }
  }
}

std::vector<std::uint64_t> nonzero_values(std::span<const std::uint64_t> cells) {
  const auto n = static_cast<std::int64_t>(cells.size());
  std::vector<std::uint64_t> out;
#ifdef BDC_HAVE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<std::uint64_t> local;
#ifdef BDC_HAVE_OPENMP
#pragma omp for schedule(static) nowait
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      if (cells[i] != 0) local.push_back(cells[i]);
    }
#ifdef BDC_HAVE_OPENMP
#pragma omp critical
#endif
    out.insert(out.end(), local.begin(), local.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void sample_incident(std::span<const std::size_t> offsets, std::span<const std::uint32_t> slots,
                     std::span<const std::uint64_t> draws, std::uint64_t seed,
                     std::span<std::uint8_t> marks) {
  const auto n = static_cast<std::int64_t>(offsets.empty() ? 0 : offsets.size() - 1);
#ifdef BDC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::int64_t v = 0; v < n; ++v) {
    sample_one(static_cast<std::size_t>(v), offsets, slots, draws, seed, [&](std::uint32_t e) {
      std::atomic_ref<std::uint8_t>(marks[e]).store(1, std::memory_order_relaxed);
    });
  }
}

}  // namespace parallel

}  // namespace bdc::kernels
