#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace bdc {

using Vertex = std::uint32_t;
using ElementId = std::uint32_t;
using MachineId = std::uint32_t;

inline constexpr ElementId kNoElement = ~ElementId{0};

// Undirected edge. Endpoint order is whatever the caller supplied; use
// `normalized()` when an order-independent key is needed.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge normalized() const { return u <= v ? Edge{u, v} : Edge{v, u}; }
  std::uint64_t key() const {
    const Edge e = normalized();
    return (std::uint64_t{e.u} << 32) | e.v;
  }
  friend bool operator==(const Edge&, const Edge&) = default;
};

using VertexPair = Edge;

// 64-bit pseudorandom identifier of an undirected edge.
struct EdgeId {
  std::uint64_t value = 0;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

// Representative of a tree in the forest: the smallest element id in the
// topmost block of the tree's Euler tour.
struct ComponentId {
  ElementId value = kNoElement;
  friend auto operator<=>(const ComponentId&, const ComponentId&) = default;
};

enum class ErrorCode {
  kCapacityExceeded,
  kCycleDetected,
  kUnknownVertex,
  kEdgeNotInForest,
  kKeyLengthMismatch,
  kBatchTooLarge,
  kMalformedJoinPair,
  kSelfLoop,
  kEdgeAbsent,
  kEdgeIdCollision,
  kContractionStalled,
  kNotTopologicallyOrdered,
  kParseError,
  kVertexOutOfRange,
  kBadParams,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// SplitMix64 finalizer. All pseudorandom functions in the engine are built
// from it so that every random choice is a pure function of its inputs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value));
}

template <typename... Ts>
constexpr std::uint64_t prf(std::uint64_t seed, Ts... values) {
  std::uint64_t h = mix64(seed);
  ((h = hash_combine(h, static_cast<std::uint64_t>(values))), ...);
  return h;
}

// Counter-based generator usable with <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// ceil(log2(x)) for x >= 1, floored at `floor_value`.
std::size_t ceil_log2(double x, std::size_t floor_value = 1);

}  // namespace bdc

template <>
struct std::hash<bdc::EdgeId> {
  std::size_t operator()(const bdc::EdgeId& id) const noexcept {
    return static_cast<std::size_t>(id.value);
  }
};

template <>
struct std::hash<bdc::ComponentId> {
  std::size_t operator()(const bdc::ComponentId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
