#pragma once

#include <cstdint>

namespace llxscx {

/// Every shared-memory step the primitives perform. A StepObserver installed
/// on a thread is called immediately before each one, which lets a scheduler
/// pause a process between any two steps.
enum class Step : std::uint8_t {
  kReadMarked,
  kReadInfo,
  kReadState,
  kReadField,
  kReadAllFrozen,  // frozen check step
  kFreezingCas,
  kFrozenStep,
  kMarkStep,
  kUpdateCas,
  kCommitStep,
  kAbortStep,
};

const char* to_string(Step s);

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void before_step(Step step) = 0;
};

/// Installs `observer` for the calling thread; pass nullptr to clear.
void set_thread_step_observer(StepObserver* observer);
StepObserver* thread_step_observer();

namespace detail {
extern thread_local StepObserver* tls_step_observer;

inline void yield_point(Step s) {
  if (tls_step_observer != nullptr) {
    tls_step_observer->before_step(s);
  }
}
}  // namespace detail

}  // namespace llxscx
