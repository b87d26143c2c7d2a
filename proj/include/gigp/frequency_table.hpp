#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gigp {

// Multiplicities M_j: the number of sources that produced exactly j items.
class FrequencyTable {
 public:
  struct Entry {
    std::int64_t j;
    std::int64_t count;
    bool operator==(const Entry&) const = default;
  };

  FrequencyTable() = default;

  // Entries may be unsorted and may repeat j (counts are added). Zero counts
  // are dropped. Throws ValidationError on negative j or count.
  explicit FrequencyTable(std::vector<Entry> entries);

  // Same, plus a consistency check against externally stated totals.
  FrequencyTable(std::vector<Entry> entries, std::int64_t stated_m, std::int64_t stated_n);

  static FrequencyTable from_sample(std::span<const std::int64_t> values);

  // Sorted by j, all counts > 0.
  const std::vector<Entry>& entries() const { return entries_; }
  std::int64_t count(std::int64_t j) const;
  std::int64_t M() const { return m_; }
  std::int64_t N() const { return n_; }
  bool empty() const { return entries_.empty(); }
  std::int64_t max_value() const { return entries_.empty() ? 0 : entries_.back().j; }

  bool operator==(const FrequencyTable&) const = default;

 private:
  std::vector<Entry> entries_;
  std::int64_t m_ = 0;
  std::int64_t n_ = 0;
};

FrequencyTable table_from_sample(std::span<const std::int64_t> values);

}  // namespace gigp
