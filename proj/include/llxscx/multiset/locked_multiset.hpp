#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <mutex>

namespace llxscx::multiset {

/// One mutex around a std::map. Baseline for benchmark comparison only.
class LockedMultiset {
 public:
  std::uint64_t get(std::int64_t key) const {
    std::lock_guard g(mu_);
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  void insert(std::int64_t key, std::uint64_t count) {
    std::lock_guard g(mu_);
    auto& c = counts_[key];
    c = count > std::numeric_limits<std::uint64_t>::max() - c
            ? std::numeric_limits<std::uint64_t>::max()
            : c + count;
  }

  bool remove(std::int64_t key, std::uint64_t count) {
    std::lock_guard g(mu_);
    auto it = counts_.find(key);
    if (it == counts_.end() || it->second < count) return false;
    it->second -= count;
    if (it->second == 0) counts_.erase(it);
    return true;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::int64_t, std::uint64_t> counts_;
};

}  // namespace llxscx::multiset
