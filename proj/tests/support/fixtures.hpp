#pragma once

#include <array>
#include <vector>

#include "llxscx/primitives.hpp"

namespace llxscx::testing {

/// Two value fields, one immutable word.
inline const RecordSchema& pair_schema() {
  static const RecordSchema schema{"Pair", {FieldKind::kValue, FieldKind::kValue}, 1};
  return schema;
}

/// A value field followed by a handle field, one immutable word.
inline const RecordSchema& link_schema() {
  static const RecordSchema schema{"Link", {FieldKind::kValue, FieldKind::kHandle}, 1};
  return schema;
}

inline DataRecord* make_pair(Process& proc, std::uint64_t tag, std::uint64_t a = 0,
                             std::uint64_t b = 0) {
  const std::array<std::uint64_t, 1> imm{tag};
  const std::array<Word, 2> mut{Word::value(a), Word::value(b)};
  return new_record(proc, pair_schema(), imm, mut);
}

inline std::vector<DataRecord*> make_pairs(Process& proc, std::size_t n) {
  std::vector<DataRecord*> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_pair(proc, i));
  return out;
}

inline std::uint64_t peek(const DataRecord* r, std::size_t field) {
  return r->field(field).load();
}

/// LLX every record, requiring snapshots.
inline bool link_all(Process& proc, const std::vector<DataRecord*>& rs) {
  for (auto* r : rs) {
    if (!llx(proc, r).is_snapshot()) return false;
  }
  return true;
}

}  // namespace llxscx::testing
