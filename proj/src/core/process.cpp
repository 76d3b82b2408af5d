#include "llxscx/process.hpp"

namespace llxscx {

void LlxTable::store(const DataRecord* r, ScxRecord* info, std::vector<Word> snapshot) {
  auto& e = entries_[r];
  e.info_seen = info;
  e.snapshot = std::move(snapshot);
}

const LlxTable::Entry* LlxTable::find(const DataRecord* r) const {
  auto it = entries_.find(r);
  return it == entries_.end() ? nullptr : &it->second;
}

void LlxTable::drop(const DataRecord* r) { entries_.erase(r); }

Process::Process(Domain& domain, ProcessId id) : domain_(&domain), id_(id) {}

DataRecord* Process::allocate_record(const RecordSchema& schema,
                                     std::span<const std::uint64_t> immutables,
                                     std::span<const Word> mutable_inits) {
  records_.push_back(std::make_unique<DataRecord>(schema, domain_->next_record_id(),
                                                  immutables, mutable_inits));
  return records_.back().get();
}

ScxRecord* Process::allocate_descriptor(std::vector<DataRecord*> v, std::vector<DataRecord*> r,
                                        FieldRef fld, Word new_value, Word old_value,
                                        std::vector<ScxRecord*> info_fields) {
  descriptors_.push_back(std::make_unique<ScxRecord>(domain_->next_descriptor_id(),
                                                     std::move(v), std::move(r), fld,
                                                     new_value, old_value,
                                                     std::move(info_fields)));
  return descriptors_.back().get();
}

void Process::for_each_record(const std::function<void(DataRecord&)>& fn) const {
  for (const auto& r : records_) fn(*r);
}

Domain::Domain() = default;
Domain::~Domain() = default;

Process& Domain::register_process() {
  std::lock_guard g(mu_);
  auto id = ProcessId{static_cast<std::uint32_t>(processes_.size())};
  processes_.push_back(std::make_unique<Process>(*this, id));
  return *processes_.back();
}

Process& Domain::process(std::size_t i) {
  std::lock_guard g(mu_);
  return *processes_.at(i);
}

std::size_t Domain::process_count() const {
  std::lock_guard g(mu_);
  return processes_.size();
}

void Domain::for_each_record(const std::function<void(DataRecord&)>& fn) const {
  std::lock_guard g(mu_);
  for (const auto& p : processes_) p->for_each_record(fn);
}

}  // namespace llxscx
