// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_SUBSET_HPP
#define FAIRDIV_SUBSET_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

namespace fairdiv {

// A subset of item ids, kept sorted ascending with no duplicates.
// Item ids are 0-based throughout the library.
struct Subset {
  std::vector<int> items;

  Subset() = default;
  explicit Subset(std::vector<int> ids) : items(std::move(ids)) {
    std::sort(items.begin(), items.end());
  }

  int k() const { return static_cast<int>(items.size()); }
  bool empty() const { return items.empty(); }
  bool contains(int id) const {
    return std::binary_search(items.begin(), items.end(), id);
  }

  bool operator==(const Subset& other) const { return items == other.items; }
  bool operator<(const Subset& other) const { return items < other.items; }
};

// True when ids are strictly increasing and inside [0, n).
inline bool is_valid_subset(const Subset& s, int n) {
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (s.items[i] < 0 || s.items[i] >= n) return false;
    if (i > 0 && s.items[i] <= s.items[i - 1]) return false;
  }
  return true;
}

}  // namespace fairdiv

#endif  // FAIRDIV_SUBSET_HPP
