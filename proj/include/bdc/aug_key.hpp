#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bdc {

// Fixed-length vector of 64-bit words under component-wise XOR. The all-zero
// value is held without storage, so untouched vertices and arc elements cost
// nothing.
class AugKey {
 public:
  AugKey() = default;
  explicit AugKey(std::size_t length) : length_(length) {}
  AugKey(std::size_t length, std::vector<std::uint64_t> words);

  std::size_t length() const { return length_; }

  // True when the value occupies storage (it may still be all-zero until
  // `compact()` is called).
  bool stored() const { return !words_.empty(); }
  bool is_zero() const;

  std::uint64_t word(std::size_t i) const { return words_.empty() ? 0 : words_[i]; }
  void set_word(std::size_t i, std::uint64_t value);

  // Stored words, empty for the zero value.
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words();
  std::vector<std::uint64_t> dense() const;

  AugKey& operator^=(const AugKey& other);
  friend AugKey operator^(AugKey a, const AugKey& b) { return a ^= b; }
  friend bool operator==(const AugKey& a, const AugKey& b);

  // Releases storage if every word is zero.
  void compact();
  void clear() { words_.clear(); }

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace bdc
