#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace llxscx {

class DataRecord;

/// Thrown when a caller breaks a precondition of the primitives (missing
/// linked LLX, R not a subsequence of V, out-of-range field, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define LLXSCX_REQUIRE(cond, msg)                                   \
  do {                                                              \
    if (!(cond)) {                                                  \
      throw ::llxscx::ContractViolation(std::string(msg) + " [" #cond "]"); \
    }                                                               \
  } while (0)

/// How a mutable field's word is interpreted. Fixed per field by the
/// record's schema.
enum class FieldKind : std::uint8_t { kValue, kHandle };

/// A single machine word stored in a mutable field: either a plain 64-bit
/// value or a handle to another DataRecord. The schema says which.
class Word {
 public:
  constexpr Word() = default;

  static constexpr Word value(std::uint64_t v) { return Word(v); }
  static Word handle(const DataRecord* r) {
    return Word(static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(r)));
  }
  static constexpr Word none() { return Word(0); }
  static constexpr Word from_bits(std::uint64_t bits) { return Word(bits); }

  constexpr std::uint64_t as_value() const { return bits_; }
  DataRecord* as_handle() const {
    return reinterpret_cast<DataRecord*>(static_cast<std::uintptr_t>(bits_));
  }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool is_none() const { return bits_ == 0; }

  friend constexpr bool operator==(Word, Word) = default;

 private:
  constexpr explicit Word(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

}  // namespace llxscx
