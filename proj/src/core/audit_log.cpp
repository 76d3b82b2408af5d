#include "llxscx/audit_log.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace llxscx::audit {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::pair<EventKind, const char*> kKindNames[] = {
    {EventKind::kRecordCreate, "record_create"}, {EventKind::kScxCreate, "scx_create"},
    {EventKind::kFreezingCas, "freezing_cas"},   {EventKind::kFrozenCheck, "frozen_check"},
    {EventKind::kFrozenStep, "frozen_step"},     {EventKind::kMarkStep, "mark_step"},
    {EventKind::kUpdateCas, "update_cas"},       {EventKind::kCommitStep, "commit_step"},
    {EventKind::kAbortStep, "abort_step"},       {EventKind::kHelpReturn, "help_return"},
    {EventKind::kLlxReturn, "llx_return"},       {EventKind::kVlxReturn, "vlx_return"},
    {EventKind::kWarning, "warning"},
};

struct Sinks {
  std::mutex mu;
  std::atomic<bool> capture_active{false};
  std::vector<Event> captured;
  std::ostream* env_out = nullptr;
  std::unique_ptr<std::ofstream> env_file;
  std::uint64_t env_seq = 0;

  Sinks() {
    const char* target = std::getenv("LLXSCX_AUDIT");
    if (target == nullptr || *target == '\0' || std::string_view(target) == "0") return;
    std::string_view t(target);
    if (t == "1" || t == "stderr") {
      env_out = &std::cerr;
    } else {
      env_file = std::make_unique<std::ofstream>(std::string(t), std::ios::app);
      if (*env_file) env_out = env_file.get();
    }
  }
};

Sinks& sinks() {
  static Sinks s;
  return s;
}

// Cached so enabled() does not touch the function-local static's guard.
const bool kEnvSink = sinks().env_out != nullptr;

std::uint64_t get_u64(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw TraceParseError(std::string("field '") + key + "' is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<std::uint64_t> get_list(const ordered_json& j, const char* key) {
  std::vector<std::uint64_t> out;
  if (!j.contains(key)) return out;
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw TraceParseError(std::string("field '") + key + "' is not an array");
  for (const auto& x : arr) {
    if (!x.is_number_unsigned()) throw TraceParseError(std::string("bad element in ") + key);
    out.push_back(x.get<std::uint64_t>());
  }
  return out;
}

}  // namespace

const char* to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

std::string to_json_line(const Event& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["event"] = to_string(e.kind);
  j["proc"] = e.process;
  j["record"] = e.record;
  j["desc"] = e.descriptor;
  j["step"] = e.step;
  if (e.ok) j["ok"] = *e.ok;
  if (e.value) j["value"] = *e.value;
  if (e.field) j["field"] = *e.field;
  if (!e.v.empty()) j["v"] = e.v;
  if (!e.r.empty()) j["r"] = e.r;
  if (!e.values.empty()) j["values"] = e.values;
  return j.dump();
}

Event parse_json_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw TraceParseError(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw TraceParseError("trace line is not an object");
  try {
    Event e;
    e.seq = get_u64(j, "seq");
    auto kind = parse_event_kind(j.at("event").get<std::string>());
    if (!kind) throw TraceParseError("unknown event kind");
    e.kind = *kind;
    e.process = static_cast<std::uint32_t>(get_u64(j, "proc"));
    e.record = get_u64(j, "record");
    e.descriptor = get_u64(j, "desc");
    e.step = j.at("step").get<std::int64_t>();
    if (j.contains("ok")) e.ok = j.at("ok").get<bool>();
    if (j.contains("value")) e.value = get_u64(j, "value");
    if (j.contains("field")) e.field = get_u64(j, "field");
    e.v = get_list(j, "v");
    e.r = get_list(j, "r");
    e.values = get_list(j, "values");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw TraceParseError(std::string("missing or mistyped field: ") + ex.what());
  }
}

void write_trace(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& e : events) out << to_json_line(e) << '\n';
}

std::vector<Event> read_trace(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_json_line(line));
    } catch (const TraceParseError& ex) {
      throw TraceParseError("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

bool enabled() {
  return kEnvSink || sinks().capture_active.load(std::memory_order_relaxed);
}

std::unique_lock<std::mutex> lock() { return std::unique_lock(sinks().mu); }

void emit_locked(Event e) {
  auto& s = sinks();
  if (s.env_out != nullptr) {
    Event copy = e;
    copy.seq = s.env_seq++;
    *s.env_out << to_json_line(copy) << '\n';
  }
  if (s.capture_active.load(std::memory_order_relaxed)) {
    e.seq = s.captured.size();
    s.captured.push_back(std::move(e));
  }
}

Capture::Capture() {
  auto& s = sinks();
  std::lock_guard g(s.mu);
  if (s.capture_active.exchange(true)) {
    throw std::logic_error("only one audit::Capture may be active");
  }
  s.captured.clear();
}

Capture::~Capture() {
  auto& s = sinks();
  std::lock_guard g(s.mu);
  s.capture_active.store(false);
  s.captured.clear();
}

std::vector<Event> Capture::events() const {
  auto& s = sinks();
  std::lock_guard g(s.mu);
  return s.captured;
}

std::vector<Event> Capture::take() {
  auto& s = sinks();
  std::lock_guard g(s.mu);
  return std::exchange(s.captured, {});
}

}  // namespace llxscx::audit
