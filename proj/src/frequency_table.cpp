#include "gigp/frequency_table.hpp"

#include <algorithm>
#include <string>

#include "gigp/error.hpp"

namespace gigp {

FrequencyTable::FrequencyTable(std::vector<Entry> entries) {
  for (const Entry& e : entries) {
    if (e.j < 0 || e.count < 0)
      throw ValidationError("frequency table: negative value or count at j=" + std::to_string(e.j));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.j < b.j; });
  for (const Entry& e : entries) {
    if (e.count == 0) continue;
    if (!entries_.empty() && entries_.back().j == e.j)
      entries_.back().count += e.count;
    else
      entries_.push_back(e);
    m_ += e.count;
    n_ += e.j * e.count;
  }
}

FrequencyTable::FrequencyTable(std::vector<Entry> entries, std::int64_t stated_m, std::int64_t stated_n)
    : FrequencyTable(std::move(entries)) {
  if (stated_m != m_ || stated_n != n_)
    throw ValidationError("frequency table: stated totals M=" + std::to_string(stated_m) + ", N=" +
                          std::to_string(stated_n) + " disagree with counts (M=" + std::to_string(m_) +
                          ", N=" + std::to_string(n_) + ")");
}

FrequencyTable FrequencyTable::from_sample(std::span<const std::int64_t> values) {
  std::vector<std::int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Entry> entries;
  for (std::int64_t v : sorted) {
    if (!entries.empty() && entries.back().j == v)
      ++entries.back().count;
    else
      entries.push_back({v, 1});
  }
  return FrequencyTable(std::move(entries));
}

std::int64_t FrequencyTable::count(std::int64_t j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const Entry& e, std::int64_t v) { return e.j < v; });
  return (it != entries_.end() && it->j == j) ? it->count : 0;
}

FrequencyTable table_from_sample(std::span<const std::int64_t> values) {
  return FrequencyTable::from_sample(values);
}

}  // namespace gigp
