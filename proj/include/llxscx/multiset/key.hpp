#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace llxscx::multiset {

/// Client keys plus the two sentinels, ordered NegInf < Client(k) < PosInf.
class Key {
 public:
  enum class Kind : std::uint8_t { kNegInf = 0, kClient = 1, kPosInf = 2 };

  static constexpr Key neg_inf() { return Key(Kind::kNegInf, 0); }
  static constexpr Key pos_inf() { return Key(Kind::kPosInf, 0); }
  static constexpr Key client(std::int64_t k) { return Key(Kind::kClient, k); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_client() const { return kind_ == Kind::kClient; }
  constexpr std::int64_t value() const { return value_; }

  friend constexpr std::strong_ordering operator<=>(const Key& a, const Key& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    return a.is_client() ? a.value_ <=> b.value_ : std::strong_ordering::equal;
  }
  friend constexpr bool operator==(const Key& a, const Key& b) { return (a <=> b) == 0; }

 private:
  constexpr Key(Kind kind, std::int64_t value) : kind_(kind), value_(value) {}
  Kind kind_;
  std::int64_t value_;
};

inline std::ostream& operator<<(std::ostream& os, const Key& k) {
  switch (k.kind()) {
    case Key::Kind::kNegInf:
      return os << "-inf";
    case Key::Kind::kPosInf:
      return os << "+inf";
    case Key::Kind::kClient:
      return os << k.value();
  }
  return os;
}

}  // namespace llxscx::multiset
