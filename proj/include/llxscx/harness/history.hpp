#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llxscx::harness {

enum class OpKind : std::uint8_t { kGet, kInsert, kDelete };
enum class EventType : std::uint8_t { kInvoke, kRespond };

const char* to_string(OpKind k);

/// One line of a recorded history.
///
/// Serialized as one JSON object per line with keys in this fixed order:
///   {"seq":N,"process":P,"op":"get|insert|delete","key":K[,"count":C],
///    "kind":"invoke|respond"[,"value":V]}
/// `count` is present for insert and delete. `value` is present only on
/// responds: an integer for get, a boolean for delete, null for insert.
struct HistoryEvent {
  std::uint64_t seq = 0;
  std::uint32_t process = 0;
  OpKind op = OpKind::kGet;
  std::int64_t key = 0;
  std::optional<std::uint64_t> count;
  EventType kind = EventType::kInvoke;
  std::optional<std::uint64_t> value;  // delete: 0/1; insert: none

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

using History = std::vector<HistoryEvent>;

class HistoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One operation extracted from a history. Pending when it has no respond.
struct Operation {
  std::uint32_t process = 0;
  OpKind op = OpKind::kGet;
  std::int64_t key = 0;
  std::uint64_t count = 0;
  std::uint64_t invoke_seq = 0;
  std::optional<std::uint64_t> respond_seq;
  std::optional<std::uint64_t> response;

  bool pending() const { return !respond_seq.has_value(); }
};

/// Validates well-formedness (strictly increasing seq, per-process
/// invoke/respond alternation, responds matching their invoke) and pairs
/// events into operations ordered by invoke. Throws HistoryError.
std::vector<Operation> to_operations(const History& h);

std::string to_json_line(const HistoryEvent& e);
HistoryEvent parse_history_line(std::string_view line);
void write_history(std::ostream& out, const History& h);
/// Throws HistoryError on malformed lines or a malformed history.
History read_history(std::istream& in);

/// Thread-safe event sink. seq is assigned under one lock so the recorded
/// order never contradicts real time.
class HistoryRecorder {
 public:
  explicit HistoryRecorder(bool enabled = true) : enabled_(enabled) {}

  void invoke(std::uint32_t process, OpKind op, std::int64_t key,
              std::optional<std::uint64_t> count);
  void respond(std::uint32_t process, OpKind op, std::int64_t key,
               std::optional<std::uint64_t> count, std::optional<std::uint64_t> value);

  History take();
  bool enabled() const { return enabled_; }

 private:
  bool enabled_;
  std::mutex mu_;
  History events_;
};

}  // namespace llxscx::harness
