// Command-line front end: stress runs, history checks and step counting.
//
// Exit codes: 0 pass, 1 property violation, 2 usage or parse error,
// 3 checker budget exhausted.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "llxscx/audit_log.hpp"
#include "llxscx/harness/auditor.hpp"
#include "llxscx/harness/checker.hpp"
#include "llxscx/harness/stress.hpp"
#include "llxscx/primitives.hpp"

namespace {

using namespace llxscx;
using namespace llxscx::harness;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::kLinearizable:
      return kExitPass;
    case Verdict::kNotLinearizable:
      return kExitViolation;
    case Verdict::kBudgetExhausted:
      return kExitBudget;
  }
  return kExitViolation;
}

std::optional<OpMix> parse_mix(const std::string& text) {
  std::array<unsigned, 3> parts{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(',', pos) : text.size();
    if (end == std::string::npos) return std::nullopt;
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, parts[i]);
    if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
    pos = end + 1;
  }
  return OpMix{parts[0], parts[1], parts[2]};
}

struct StressFlags {
  std::size_t threads = 4;
  std::size_t ops = 1000;
  std::uint64_t key_range = 8;
  std::string mix = "34,33,33";
  std::uint64_t seed = 1;
  bool check = false;
  std::string save;
  bool controlled = false;
  std::string impl = "list";
  bool machine = false;
  bool audit = false;
  std::uint64_t budget = CheckOptions{}.budget;
};

void print_table(std::ostream& out, const StressResult& r) {
  static constexpr std::array<const char*, 11> kHeads{
      "proc", "gets", "inserts", "deletes", "del_true", "retries",
      "llx_fail", "scx", "scx_ok", "frz_fail", "upd_fail"};
  auto row = [&](const std::string& label, const WorkerTallies& t) {
    const std::array<std::uint64_t, 10> cells{t.gets, t.inserts, t.deletes, t.deletes_true,
                                              t.retries(), t.llx_fail, t.scx_calls,
                                              t.scx_success, t.freezing_cas_failures,
                                              t.update_cas_failures};
    out << std::left << std::setw(6) << label << std::right;
    for (auto c : cells) out << std::setw(10) << c;
    out << '\n';
  };
  out << std::left << std::setw(6) << kHeads[0] << std::right;
  for (std::size_t i = 1; i < kHeads.size(); ++i) out << std::setw(10) << kHeads[i];
  out << '\n';
  for (std::size_t i = 0; i < r.per_process.size(); ++i) row(std::to_string(i), r.per_process[i]);
  row("total", r.totals());
}

int cmd_stress(const StressFlags& f) {
  const auto mix = parse_mix(f.mix);
  if (!mix) {
    std::cerr << "error: --mix expects g,i,d (three non-negative integers)\n";
    return kExitUsage;
  }
  StressConfig cfg;
  cfg.processes = f.threads;
  cfg.ops_per_process = f.ops;
  cfg.key_range = f.key_range;
  cfg.mix = *mix;
  cfg.seed = f.seed;
  cfg.controlled = f.controlled;
  cfg.record_history = f.check || !f.save.empty();
  if (auto err = validate(cfg); !err.empty()) {
    std::cerr << "error: " << err << '\n';
    return kExitUsage;
  }

  std::optional<audit::Capture> capture;
  if (f.audit) capture.emplace();

  std::unique_ptr<StressTarget> target;
  ListTarget* list_target = nullptr;
  if (f.impl == "list") {
    auto t = std::make_unique<ListTarget>();
    list_target = t.get();
    target = std::move(t);
  } else {
    target = std::make_unique<LockedTarget>();
  }
  const StressResult result = run_stress(cfg, *target);

  int code = kExitPass;
  std::optional<CheckResult> verdict;
  if (f.check) {
    verdict = check_linearizable(result.history, CheckOptions{f.budget});
    code = exit_for(verdict->verdict);
  }
  std::string structure = "n/a";
  if (list_target) {
    structure = list_target->list().check_sorted_chain();
    if (structure.empty()) {
      structure = "ok";
    } else if (code == kExitPass) {
      code = kExitViolation;
    }
  }
  std::optional<AuditReport> audit_report;
  if (capture) {
    const auto trace = capture->take();
    capture.reset();
    audit_report = audit_invariants(trace);
    if (!audit_report->ok() && code == kExitPass) code = kExitViolation;
  }
  if (!f.save.empty()) {
    std::ofstream out(f.save);
    write_history(out, result.history);
    if (!out) {
      std::cerr << "error: cannot write " << f.save << '\n';
      return kExitUsage;
    }
  }

  const auto totals = result.totals();
  const double throughput =
      result.wall_seconds > 0 ? static_cast<double>(totals.ops()) / result.wall_seconds : 0.0;

  auto& out = std::cout;
  out << "impl " << f.impl << "  threads " << f.threads << "  ops " << f.ops << "  key-range "
      << f.key_range << "  mix " << mix->get << ',' << mix->insert << ',' << mix->del << "  seed "
      << f.seed << (f.controlled ? "  controlled" : "") << "\n\n";
  print_table(out, result);
  out << '\n';
  if (!f.controlled) {
    out << "wall time    " << std::fixed << std::setprecision(3) << result.wall_seconds << " s\n"
        << "throughput   " << std::setprecision(0) << throughput << " ops/s\n";
    out.unsetf(std::ios::floatfield);
  }
  out << "structure    " << structure << '\n';
  if (verdict) {
    out << "checker      " << to_string(verdict->verdict) << " (explored " << verdict->explored;
    if (verdict->verdict == Verdict::kNotLinearizable) out << ", key " << verdict->failing_key;
    out << ")\n";
  }
  if (audit_report) out << "audit        " << audit_report->summary() << '\n';

  if (f.machine) {
    ordered_json j;
    j["command"] = "stress";
    j["impl"] = f.impl;
    j["threads"] = f.threads;
    j["ops"] = f.ops;
    j["key_range"] = f.key_range;
    j["mix"] = {mix->get, mix->insert, mix->del};
    j["seed"] = f.seed;
    j["controlled"] = f.controlled;
    j["total_ops"] = totals.ops();
    j["gets"] = totals.gets;
    j["inserts"] = totals.inserts;
    j["deletes"] = totals.deletes;
    j["deletes_true"] = totals.deletes_true;
    j["retries"] = totals.retries();
    j["llx_fail"] = totals.llx_fail;
    j["scx_calls"] = totals.scx_calls;
    j["scx_success"] = totals.scx_success;
    j["freezing_cas_failures"] = totals.freezing_cas_failures;
    j["update_cas_failures"] = totals.update_cas_failures;
    if (!f.controlled) {
      j["wall_seconds"] = result.wall_seconds;
      j["throughput"] = throughput;
    }
    j["structure"] = structure;
    j["verdict"] = verdict ? ordered_json(to_string(verdict->verdict)) : ordered_json(nullptr);
    if (audit_report) j["audit_violations"] = audit_report->violations.size();
    j["exit"] = code;
    out << j.dump() << '\n';
  }
  return code;
}

int cmd_check(const std::string& path, std::uint64_t budget, bool machine) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << '\n';
    return kExitUsage;
  }
  History h;
  try {
    h = read_history(in);
  } catch (const HistoryError& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const auto r = check_linearizable(h, CheckOptions{budget});
  std::cout << "events     " << h.size() << '\n'
            << "verdict    " << to_string(r.verdict) << '\n'
            << "explored   " << r.explored << '\n';
  if (r.verdict == Verdict::kNotLinearizable) std::cout << "key        " << r.failing_key << '\n';
  if (machine) {
    ordered_json j;
    j["command"] = "check";
    j["events"] = h.size();
    j["verdict"] = to_string(r.verdict);
    j["explored"] = r.explored;
    if (r.verdict == Verdict::kNotLinearizable) j["failing_key"] = r.failing_key;
    j["exit"] = exit_for(r.verdict);
    std::cout << j.dump() << '\n';
  }
  return exit_for(r.verdict);
}

const RecordSchema& cell_schema() {
  static const RecordSchema schema{"Cell", {FieldKind::kValue}, 0};
  return schema;
}

int cmd_steps(std::size_t k, std::size_t f, bool machine) {
  if (k < 1 || f > k) {
    std::cerr << "error: need --v >= 1 and 0 <= --r <= --v\n";
    return kExitUsage;
  }
  Domain domain;
  Process& p = domain.register_process();
  std::vector<DataRecord*> v;
  for (std::size_t i = 0; i < k; ++i) {
    const std::array<Word, 1> init{Word::value(0)};
    v.push_back(new_record(p, cell_schema(), {}, init));
  }
  for (auto* r : v) {
    if (!llx(p, r).is_snapshot()) {
      std::cerr << "error: LLX on a quiescent record did not return a snapshot\n";
      return kExitViolation;
    }
  }
  const bool vlx_ok = vlx(p, v);
  const auto vlx_reads = p.last_counters().shared_reads;

  const std::vector<DataRecord*> r(v.end() - static_cast<std::ptrdiff_t>(f), v.end());
  const bool scx_ok = scx(p, v, r, {v.front(), 0}, Word::value(1));
  const auto c = p.last_counters();

  std::cout << "V " << k << "  R " << f << '\n'
            << "            measured  expected\n"
            << "cas         " << std::setw(8) << c.cas_steps() << "  " << std::setw(8) << k + 1 << '\n'
            << "writes      " << std::setw(8) << c.writes << "  " << std::setw(8) << f + 2 << '\n'
            << "vlx reads   " << std::setw(8) << vlx_reads << "  " << std::setw(8) << k << '\n'
            << "scx         " << (scx_ok ? "true" : "false") << '\n';

  std::vector<std::string> diffs;
  if (!scx_ok) diffs.push_back("uncontended SCX returned false");
  if (!vlx_ok) diffs.push_back("uncontended VLX returned false");
  if (c.cas_steps() != k + 1) {
    diffs.push_back("cas: measured " + std::to_string(c.cas_steps()) + ", expected " +
                    std::to_string(k + 1));
  }
  if (c.writes != f + 2) {
    diffs.push_back("writes: measured " + std::to_string(c.writes) + ", expected " +
                    std::to_string(f + 2));
  }
  if (vlx_reads != k) {
    diffs.push_back("vlx reads: measured " + std::to_string(vlx_reads) + ", expected " +
                    std::to_string(k));
  }
  for (const auto& d : diffs) std::cout << "mismatch    " << d << '\n';
  const int code = diffs.empty() ? kExitPass : kExitViolation;
  if (machine) {
    ordered_json j;
    j["command"] = "steps";
    j["v"] = k;
    j["r"] = f;
    j["cas"] = c.cas_steps();
    j["writes"] = c.writes;
    j["vlx_reads"] = vlx_reads;
    j["exit"] = code;
    std::cout << j.dump() << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLX/SCX multiset test harness"};
  app.require_subcommand(1);

  StressFlags sf;
  auto* stress = app.add_subcommand("stress", "Run random concurrent operations on a multiset");
  stress->add_option("--threads", sf.threads, "Worker processes")->check(CLI::PositiveNumber);
  stress->add_option("--ops", sf.ops, "Operations per worker");
  stress->add_option("--key-range", sf.key_range, "Keys are drawn from [0, K)");
  stress->add_option("--mix", sf.mix, "Percentages get,insert,delete (sum 100)");
  stress->add_option("--seed", sf.seed, "Random seed");
  stress->add_flag("--check", sf.check, "Check the history for linearizability");
  stress->add_option("--save", sf.save, "Write the history to PATH");
  stress->add_flag("--controlled", sf.controlled, "Deterministic cooperative scheduling");
  stress->add_option("--impl", sf.impl, "list or locked")
      ->check(CLI::IsMember({"list", "locked"}));
  stress->add_flag("--audit", sf.audit, "Record the step trace and audit its invariants");
  stress->add_option("--budget", sf.budget, "Checker search budget");
  stress->add_flag("--machine", sf.machine, "Append a one-line JSON summary");

  std::string history_path;
  std::uint64_t check_budget = CheckOptions{}.budget;
  bool check_machine = false;
  auto* check = app.add_subcommand("check", "Check a saved history for linearizability");
  check->add_option("--history", history_path, "History file")->required();
  check->add_option("--budget", check_budget, "Checker search budget");
  check->add_flag("--machine", check_machine, "Append a one-line JSON summary");

  std::size_t steps_v = 0;
  std::size_t steps_r = 0;
  bool steps_machine = false;
  auto* steps = app.add_subcommand("steps", "Count the steps of one uncontended SCX");
  steps->add_option("--v", steps_v, "|V|")->required();
  steps->add_option("--r", steps_r, "|R|")->required();
  steps->add_flag("--machine", steps_machine, "Append a one-line JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*stress) return cmd_stress(sf);
    if (*check) return cmd_check(history_path, check_budget, check_machine);
    return cmd_steps(steps_v, steps_r, steps_machine);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitViolation;
  }
}
