#include "llxscx/harness/auditor.hpp"

#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace llxscx::harness {
namespace {

using audit::EventKind;

enum class State { kInProgress, kCommitted, kAborted };

const char* name(State s) {
  switch (s) {
    case State::kInProgress:
      return "InProgress";
    case State::kCommitted:
      return "Committed";
    case State::kAborted:
      return "Aborted";
  }
  return "?";
}

struct DescInfo {
  bool known = false;  // saw its scx_create
  State state = State::kInProgress;
  bool all_frozen = false;
  std::vector<std::uint64_t> v;
  std::vector<std::uint64_t> r;
  std::set<std::int64_t> frozen_indices;
  std::uint64_t update_attempts = 0;
  bool update_succeeded = false;
  std::optional<bool> help_result;
};

struct RecordInfo {
  std::optional<std::uint64_t> info;  // unknown until first sighting
  std::set<std::uint64_t> infos_held;
  bool marked = false;
  bool finalized = false;
  std::map<std::uint64_t, std::set<std::uint64_t>> values_held;  // field -> values
};

class Auditor {
 public:
  AuditReport run(std::span<const audit::Event> trace) {
    for (const auto& e : trace) apply(e);
    report_.events = trace.size();
    report_.descriptors = descs_.size();
    return std::move(report_);
  }

 private:
  void flag(const char* inv, const audit::Event& e, const std::string& detail) {
    report_.violations.push_back({inv, e.seq, detail});
  }

  std::string desc_str(std::uint64_t d) { return "descriptor " + std::to_string(d); }
  std::string rec_str(std::uint64_t r) { return "record " + std::to_string(r); }

  void apply(const audit::Event& e) {
    switch (e.kind) {
      case EventKind::kRecordCreate: {
        RecordInfo fresh;
        fresh.info = 0;  // dummy
        fresh.infos_held.insert(0);
        for (std::size_t i = 0; i < e.values.size(); ++i) fresh.values_held[i].insert(e.values[i]);
        records_[e.record] = std::move(fresh);
        break;
      }
      case EventKind::kScxCreate: {
        DescInfo d;
        d.known = true;
        d.v = e.v;
        d.r = e.r;
        descs_[e.descriptor] = std::move(d);
        break;
      }
      case EventKind::kFreezingCas:
        on_freeze(e);
        break;
      case EventKind::kFrozenCheck:
        break;
      case EventKind::kFrozenStep: {
        auto& d = descs_[e.descriptor];
        if (!d.all_frozen) {
          if (d.state != State::kInProgress) {
            flag(invariant::kStateMachine, e,
                 desc_str(e.descriptor) + ": [" + name(d.state) + ",F] -> [" + name(d.state) + ",T]");
          } else {
            d.all_frozen = true;
          }
        }
        break;
      }
      case EventKind::kAbortStep: {
        auto& d = descs_[e.descriptor];
        if (d.state == State::kAborted) break;
        if (d.state == State::kInProgress && !d.all_frozen) {
          d.state = State::kAborted;
        } else {
          flag(invariant::kStateMachine, e,
               desc_str(e.descriptor) + ": [" + name(d.state) + "," + (d.all_frozen ? "T" : "F") +
                   "] -> [Aborted," + (d.all_frozen ? "T" : "F") + "]");
        }
        break;
      }
      case EventKind::kCommitStep: {
        auto& d = descs_[e.descriptor];
        if (d.state == State::kCommitted) break;
        if (d.state == State::kInProgress && d.all_frozen) {
          d.state = State::kCommitted;
          for (auto rid : d.r) {
            auto& rec = records_[rid];
            if (rec.marked && rec.info == e.descriptor) rec.finalized = true;
          }
        } else {
          flag(invariant::kStateMachine, e,
               desc_str(e.descriptor) + ": [" + name(d.state) + "," + (d.all_frozen ? "T" : "F") +
                   "] -> [Committed," + (d.all_frozen ? "T" : "F") + "]");
        }
        break;
      }
      case EventKind::kMarkStep: {
        auto& rec = records_[e.record];
        if (rec.info && *rec.info != e.descriptor) {
          flag(invariant::kUnfrozenUpdate, e,
               rec_str(e.record) + " marked by " + desc_str(e.descriptor) + " while its info is " +
                   desc_str(*rec.info));
        }
        rec.marked = true;
        break;
      }
      case EventKind::kUpdateCas:
        on_update(e);
        break;
      case EventKind::kHelpReturn: {
        auto& d = descs_[e.descriptor];
        const bool result = e.ok.value_or(false);
        if (d.help_result && *d.help_result != result) {
          flag(invariant::kHelperAgreement, e,
               desc_str(e.descriptor) + ": help returned both true and false");
        }
        d.help_result = result;
        break;
      }
      case EventKind::kLlxReturn:
      case EventKind::kVlxReturn:
      case EventKind::kWarning:
        break;
    }
  }

  void on_freeze(const audit::Event& e) {
    auto& d = descs_[e.descriptor];
    if (d.known && e.step > 0 && !d.frozen_indices.contains(e.step - 1)) {
      flag(invariant::kFreezeOrder, e,
           desc_str(e.descriptor) + ": freezing CAS on V[" + std::to_string(e.step) +
               "] before V[" + std::to_string(e.step - 1) + "] was frozen");
    }
    if (!e.ok.value_or(false)) return;
    d.frozen_indices.insert(e.step);
    auto& rec = records_[e.record];
    if (rec.finalized) {
      flag(invariant::kPermafrozen, e, rec_str(e.record) + " re-frozen after finalization");
    }
    if (rec.infos_held.contains(e.descriptor)) {
      flag(invariant::kInfoFreshness, e,
           rec_str(e.record) + " info set to " + desc_str(e.descriptor) + " a second time");
    }
    rec.infos_held.insert(e.descriptor);
    rec.info = e.descriptor;
  }

  void on_update(const audit::Event& e) {
    auto& d = descs_[e.descriptor];
    ++d.update_attempts;
    if (!e.ok.value_or(false)) return;
    if (d.update_succeeded) {
      flag(invariant::kSingleUpdate, e, desc_str(e.descriptor) + ": second successful update CAS");
    } else if (d.update_attempts > 1) {
      flag(invariant::kSingleUpdate, e,
           desc_str(e.descriptor) + ": successful update CAS was not the first attempted");
    }
    d.update_succeeded = true;

    auto& rec = records_[e.record];
    if (rec.finalized) {
      flag(invariant::kPermafrozen, e, rec_str(e.record) + " changed after finalization");
    }
    if ((rec.info && *rec.info != e.descriptor) || d.state != State::kInProgress) {
      flag(invariant::kUnfrozenUpdate, e,
           rec_str(e.record) + " field changed while not frozen for " + desc_str(e.descriptor));
    }
    if (e.value && e.field) {
      auto& held = rec.values_held[*e.field];
      if (held.contains(*e.value)) {
        flag(invariant::kAbaConstraint, e,
             rec_str(e.record) + " field " + std::to_string(*e.field) + " set back to " +
                 std::to_string(*e.value));
      }
      held.insert(*e.value);
    }
  }

  AuditReport report_;
  std::unordered_map<std::uint64_t, DescInfo> descs_;
  std::unordered_map<std::uint64_t, RecordInfo> records_;
};

}  // namespace

std::size_t AuditReport::count(const std::string& inv) const {
  std::size_t n = 0;
  for (const auto& v : violations) n += v.invariant == inv ? 1 : 0;
  return n;
}

std::string AuditReport::summary() const {
  std::ostringstream os;
  os << events << " events, " << descriptors << " descriptors, " << violations.size()
     << " violations";
  for (const auto& v : violations) os << "\n  [" << v.invariant << "] seq " << v.seq << ": " << v.detail;
  return os.str();
}

AuditReport audit_invariants(std::span<const audit::Event> trace) { return Auditor().run(trace); }

}  // namespace llxscx::harness
