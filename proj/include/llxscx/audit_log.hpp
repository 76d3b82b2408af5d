#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llxscx::audit {

// Debug audit log for the primitives.
//
// While auditing is enabled each audited shared step runs under one global
// lock together with the append of its event, so the log order is exactly the
// order in which the steps took effect. The log is enabled by an active
// Capture or by setting LLXSCX_AUDIT (a file path, or "1"/"stderr").
//
// Line format (one JSON object per line, keys in this order, optional keys
// omitted when unused):
//   seq, event, proc, record, desc, step, ok, value, field, v, r, values
// Handles stored in mutable fields are logged as the referenced record's id
// (0 for none), so traces do not depend on allocation addresses.

enum class EventKind : std::uint8_t {
  kRecordCreate,  // record, values = initial mutable words
  kScxCreate,     // desc, record = fld record, field, value = new, v, r
  kFreezingCas,   // desc, record, step = index in V, ok
  kFrozenCheck,   // desc, ok = allFrozen value read
  kFrozenStep,    // desc
  kMarkStep,      // desc, record, step = index in R
  kUpdateCas,     // desc, record, field, ok, value = new word
  kCommitStep,    // desc
  kAbortStep,     // desc
  kHelpReturn,    // desc, ok = return value
  kLlxReturn,     // record, desc = info seen, value = 0 snapshot / 1 fail / 2 finalized
  kVlxReturn,     // ok
  kWarning,       // record, value; free-form note in `field`-less form
};

const char* to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kWarning;
  std::uint32_t process = 0;
  std::uint64_t record = 0;
  std::uint64_t descriptor = 0;
  std::int64_t step = -1;
  std::optional<bool> ok;
  std::optional<std::uint64_t> value;
  std::optional<std::uint64_t> field;
  std::vector<std::uint64_t> v;
  std::vector<std::uint64_t> r;
  std::vector<std::uint64_t> values;

  friend bool operator==(const Event&, const Event&) = default;
};

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_json_line(const Event& e);
Event parse_json_line(std::string_view line);

void write_trace(std::ostream& out, const std::vector<Event>& events);
/// Reads a whole trace; blank lines are skipped, anything else malformed
/// throws TraceParseError naming the line number.
std::vector<Event> read_trace(std::istream& in);

/// True while any sink is active. Cheap; safe to call on hot paths.
bool enabled();

/// Lock held around an audited step and its emit().
std::unique_lock<std::mutex> lock();

/// Appends an event. Caller must hold lock().
void emit_locked(Event e);

/// Collects all events emitted while alive into memory. At most one Capture
/// may be alive at a time.
class Capture {
 public:
  Capture();
  ~Capture();
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  /// Snapshot of the events so far.
  std::vector<Event> events() const;
  /// Moves the events out and starts a fresh sequence.
  std::vector<Event> take();
};

}  // namespace llxscx::audit
