#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "llxscx/process.hpp"
#include "llxscx/record.hpp"
#include "llxscx/word.hpp"

namespace llxscx {

/// Result of an LLX: a snapshot of the record's mutable fields, Fail, or
/// Finalized.
class LlxResult {
 public:
  enum class Kind : std::uint8_t { kSnapshot, kFail, kFinalized };

  static LlxResult snapshot(std::vector<Word> words) {
    return LlxResult(Kind::kSnapshot, std::move(words));
  }
  static LlxResult fail() { return LlxResult(Kind::kFail, {}); }
  static LlxResult finalized() { return LlxResult(Kind::kFinalized, {}); }

  Kind kind() const { return kind_; }
  bool is_snapshot() const { return kind_ == Kind::kSnapshot; }
  bool is_fail() const { return kind_ == Kind::kFail; }
  bool is_finalized() const { return kind_ == Kind::kFinalized; }

  /// Snapshot words, one per mutable field. Empty unless is_snapshot().
  std::span<const Word> words() const { return words_; }
  Word operator[](std::size_t i) const { return words_.at(i); }

 private:
  LlxResult(Kind kind, std::vector<Word> words) : kind_(kind), words_(std::move(words)) {}
  Kind kind_;
  std::vector<Word> words_;
};

const char* to_string(LlxResult::Kind k);

/// Selects a mutable or immutable field for read_field().
struct Field {
  enum class Kind : std::uint8_t { kMutable, kImmutable };
  Kind kind;
  std::size_t index;

  static constexpr Field mut(std::size_t i) { return {Kind::kMutable, i}; }
  static constexpr Field imm(std::size_t i) { return {Kind::kImmutable, i}; }
};

/// Creates a record owned by `proc`. info starts at the dummy descriptor and
/// marked starts false.
DataRecord* new_record(Process& proc, const RecordSchema& schema,
                       std::span<const std::uint64_t> immutables,
                       std::span<const Word> mutable_inits);

/// Load-link-extended. On a snapshot the result is remembered in the
/// caller's LLX table for a later scx()/vlx().
LlxResult llx(Process& proc, DataRecord* r);

/// Store-conditional-extended: atomically stores `new_value` into `fld` and
/// finalizes every record in `R`, provided no record in `V` changed since the
/// caller's linked LLX of it. Requires a linked LLX for each record of V,
/// R a subsequence of V, fld in V, and no duplicates in V.
bool scx(Process& proc, std::span<DataRecord* const> V, std::span<DataRecord* const> R,
         FieldRef fld, Word new_value);

/// Validate-extended: true iff no record of V changed since the linked LLX.
bool vlx(Process& proc, std::span<DataRecord* const> V);

/// Carries out the descriptor's SCX on behalf of `proc`. Any number of
/// processes may help the same descriptor; all that terminate agree on the
/// result.
bool help(Process& proc, ScxRecord* scx_record);

/// A single read of one field.
Word read_field(Process& proc, const DataRecord* r, Field which);

/// True if `r` is frozen for its current info descriptor. Diagnostic only.
bool is_frozen(const DataRecord* r);

}  // namespace llxscx
