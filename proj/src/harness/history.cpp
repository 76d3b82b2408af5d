#include "llxscx/harness/history.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace llxscx::harness {
namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<OpKind> parse_op(std::string_view s) {
  if (s == "get") return OpKind::kGet;
  if (s == "insert") return OpKind::kInsert;
  if (s == "delete") return OpKind::kDelete;
  return std::nullopt;
}

}  // namespace

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::kGet:
      return "get";
    case OpKind::kInsert:
      return "insert";
    case OpKind::kDelete:
      return "delete";
  }
  return "?";
}

std::vector<Operation> to_operations(const History& h) {
  std::vector<Operation> ops;
  ops.reserve(h.size() / 2 + 1);
  // (process, index into ops) for each open operation; one per process.
  std::vector<std::pair<std::uint32_t, std::size_t>> open;
  std::optional<std::uint64_t> last_seq;
  for (const auto& e : h) {
    if (last_seq && e.seq <= *last_seq) {
      throw HistoryError("seq " + std::to_string(e.seq) + " is not increasing");
    }
    last_seq = e.seq;
    const bool needs_count = e.op != OpKind::kGet;
    if (needs_count != e.count.has_value()) {
      throw HistoryError("seq " + std::to_string(e.seq) + ": count presence does not match op");
    }
    if (needs_count && *e.count == 0) {
      throw HistoryError("seq " + std::to_string(e.seq) + ": count must be positive");
    }
    auto it = std::find_if(open.begin(), open.end(),
                           [&](const auto& o) { return o.first == e.process; });
    if (e.kind == EventType::kInvoke) {
      if (it != open.end()) {
        throw HistoryError("seq " + std::to_string(e.seq) + ": process " +
                           std::to_string(e.process) + " invokes while another op is open");
      }
      Operation op;
      op.process = e.process;
      op.op = e.op;
      op.key = e.key;
      op.count = e.count.value_or(0);
      op.invoke_seq = e.seq;
      open.emplace_back(e.process, ops.size());
      ops.push_back(op);
    } else {
      if (it == open.end()) {
        throw HistoryError("seq " + std::to_string(e.seq) + ": respond without invoke");
      }
      Operation& op = ops[it->second];
      if (op.op != e.op || op.key != e.key || op.count != e.count.value_or(0)) {
        throw HistoryError("seq " + std::to_string(e.seq) + ": respond does not match invoke");
      }
      const bool needs_value = e.op != OpKind::kInsert;
      if (needs_value != e.value.has_value()) {
        throw HistoryError("seq " + std::to_string(e.seq) + ": bad response value");
      }
      op.respond_seq = e.seq;
      op.response = e.value;
      *it = open.back();
      open.pop_back();
    }
  }
  return ops;
}

std::string to_json_line(const HistoryEvent& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["process"] = e.process;
  j["op"] = to_string(e.op);
  j["key"] = e.key;
  if (e.count) j["count"] = *e.count;
  j["kind"] = e.kind == EventType::kInvoke ? "invoke" : "respond";
  if (e.kind == EventType::kRespond) {
    switch (e.op) {
      case OpKind::kGet:
        j["value"] = e.value.value_or(0);
        break;
      case OpKind::kInsert:
        j["value"] = nullptr;
        break;
      case OpKind::kDelete:
        j["value"] = e.value.value_or(0) != 0;
        break;
    }
  }
  return j.dump();
}

HistoryEvent parse_history_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw HistoryError(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw HistoryError("history line is not an object");
  try {
    HistoryEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.process = j.at("process").get<std::uint32_t>();
    auto op = parse_op(j.at("op").get<std::string>());
    if (!op) throw HistoryError("unknown op");
    e.op = *op;
    e.key = j.at("key").get<std::int64_t>();
    if (j.contains("count")) e.count = j.at("count").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "invoke") {
      e.kind = EventType::kInvoke;
      if (j.contains("value")) throw HistoryError("invoke carries a value");
    } else if (kind == "respond") {
      e.kind = EventType::kRespond;
      const auto& v = j.at("value");
      switch (e.op) {
        case OpKind::kGet:
          if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw HistoryError("get response must be a non-negative integer");
          }
          e.value = v.get<std::uint64_t>();
          break;
        case OpKind::kInsert:
          if (!v.is_null()) throw HistoryError("insert response must be null");
          break;
        case OpKind::kDelete:
          if (!v.is_boolean()) throw HistoryError("delete response must be a boolean");
          e.value = v.get<bool>() ? 1 : 0;
          break;
      }
    } else {
      throw HistoryError("unknown kind '" + kind + "'");
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw HistoryError(std::string("missing or mistyped field: ") + ex.what());
  }
}

void write_history(std::ostream& out, const History& h) {
  for (const auto& e : h) out << to_json_line(e) << '\n';
}

History read_history(std::istream& in) {
  History h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      h.push_back(parse_history_line(line));
    } catch (const HistoryError& ex) {
      throw HistoryError("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  to_operations(h);
  return h;
}

void HistoryRecorder::invoke(std::uint32_t process, OpKind op, std::int64_t key,
                             std::optional<std::uint64_t> count) {
  if (!enabled_) return;
  std::lock_guard g(mu_);
  events_.push_back({events_.size(), process, op, key, count, EventType::kInvoke, std::nullopt});
}

void HistoryRecorder::respond(std::uint32_t process, OpKind op, std::int64_t key,
                              std::optional<std::uint64_t> count,
                              std::optional<std::uint64_t> value) {
  if (!enabled_) return;
  std::lock_guard g(mu_);
  events_.push_back({events_.size(), process, op, key, count, EventType::kRespond, value});
}

History HistoryRecorder::take() {
  std::lock_guard g(mu_);
  return std::exchange(events_, {});
}

}  // namespace llxscx::harness
