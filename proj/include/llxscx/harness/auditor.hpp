#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llxscx/audit_log.hpp"

namespace llxscx::harness {

/// Invariant names used in violations.
namespace invariant {
inline constexpr const char* kStateMachine = "state machine";
inline constexpr const char* kInfoFreshness = "info freshness";
inline constexpr const char* kSingleUpdate = "single update";
inline constexpr const char* kFreezeOrder = "freeze ordering";
inline constexpr const char* kHelperAgreement = "helper agreement";
inline constexpr const char* kPermafrozen = "permafrozen";
inline constexpr const char* kUnfrozenUpdate = "unfrozen update";
inline constexpr const char* kAbaConstraint = "aba constraint";
}  // namespace invariant

struct Violation {
  std::string invariant;
  std::uint64_t seq;
  std::string detail;
};

struct AuditReport {
  std::vector<Violation> violations;
  std::uint64_t events = 0;
  std::uint64_t descriptors = 0;

  bool ok() const { return violations.empty(); }
  std::size_t count(const std::string& invariant) const;
  std::string summary() const;
};

/// Replays a trace recorded with auditing on and checks:
///  - every [state, allFrozen] change is an edge of
///    [InProgress,F] -> [InProgress,T] -> [Committed,T] or
///    [InProgress,F] -> [Aborted,F];
///  - no record's info field is ever set to a descriptor it held before;
///  - per descriptor, at most one successful update CAS, and only the first;
///  - a freezing CAS on V[i] only after a successful one on V[i-1];
///  - all help() returns for one descriptor agree;
///  - a finalized record (marked, info Committed) never changes again;
///  - a field only changes while its record is frozen for the changer;
///  - an update never stores a value its field held before.
/// Records created before the trace began are tracked from first sight.
AuditReport audit_invariants(std::span<const audit::Event> trace);

}  // namespace llxscx::harness
