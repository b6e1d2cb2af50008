#include "bdc/aug_key.hpp"

#include <algorithm>

#include "bdc/common.hpp"
#include "bdc/kernels.hpp"

namespace bdc {

AugKey::AugKey(std::size_t length, std::vector<std::uint64_t> words)
    : length_(length), words_(std::move(words)) {
  if (!words_.empty() && words_.size() != length_) {
    throw Error(ErrorCode::kKeyLengthMismatch, "key has " + std::to_string(words_.size()) +
                                                   " words, expected " + std::to_string(length_));
  }
}

bool AugKey::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

void AugKey::set_word(std::size_t i, std::uint64_t value) {
  if (words_.empty()) {
    if (value == 0) return;
    words_.assign(length_, 0);
  }
  words_[i] = value;
}

std::span<std::uint64_t> AugKey::mutable_words() {
  if (words_.empty()) words_.assign(length_, 0);
  return words_;
}

std::vector<std::uint64_t> AugKey::dense() const {
  return words_.empty() ? std::vector<std::uint64_t>(length_, 0) : words_;
}

AugKey& AugKey::operator^=(const AugKey& other) {
  if (other.length_ != length_) {
    throw Error(ErrorCode::kKeyLengthMismatch, "xor of keys with different lengths");
  }
  if (other.words_.empty()) return *this;
  if (words_.empty()) {
    words_ = other.words_;
    return *this;
  }
  kernels::xor_into(words_, other.words_);
  return *this;
}

bool operator==(const AugKey& a, const AugKey& b) {
  if (a.length_ != b.length_) return false;
  if (a.words_.empty()) return b.is_zero();
  if (b.words_.empty()) return a.is_zero();
  return a.words_ == b.words_;
}

void AugKey::compact() {
  if (is_zero()) words_.clear();
}

}  // namespace bdc
