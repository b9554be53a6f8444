#pragma once

// Sets of lattice sites. Sites are 0-based here: site j of the chain
// (1 <= j <= N in the usual physics labelling) is index j - 1.

#include <algorithm>
#include <string>
#include <vector>

#include "qprobe/config.hpp"

namespace qprobe {

class Region {
 public:
  Region() = default;

  // Indices are sorted; duplicates are rejected.
  explicit Region(std::vector<int> sites) : sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end());
    if (!sites_.empty() && sites_.front() < 0) throw ValidationError("region has a negative site index");
    if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
      throw ValidationError("region has duplicate site indices");
    }
  }

  /// Sites [first, first + count).
  static Region range(int first, int count) {
    std::vector<int> s;
    s.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) s.push_back(first + i);
    return Region(std::move(s));
  }

  const std::vector<int>& sites() const { return sites_; }
  int size() const { return static_cast<int>(sites_.size()); }
  bool empty() const { return sites_.empty(); }

  void check_bounds(int n_sites) const {
    if (!sites_.empty() && (sites_.front() < 0 || sites_.back() >= n_sites)) {
      throw ValidationError("region out of bounds: sites must lie in [0, " + std::to_string(n_sites) + ")");
    }
  }

  bool overlaps(const Region& other) const {
    std::vector<int> common;
    std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                          std::back_inserter(common));
    return !common.empty();
  }

  Region united(const Region& other) const {
    std::vector<int> u;
    std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(), std::back_inserter(u));
    return Region(std::move(u));
  }

  /// Sites of [0, n_sites) not in this region.
  Region complement(int n_sites) const {
    std::vector<int> c;
    c.reserve(static_cast<std::size_t>(n_sites));
    auto it = sites_.begin();
    for (int j = 0; j < n_sites; ++j) {
      if (it != sites_.end() && *it == j) {
        ++it;
      } else {
        c.push_back(j);
      }
    }
    return Region(std::move(c));
  }

  /// Number of maximal runs of consecutive sites.
  int contiguous_runs() const {
    int runs = 0;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (i == 0 || sites_[i] != sites_[i - 1] + 1) ++runs;
    }
    return runs;
  }

  bool operator==(const Region&) const = default;

 private:
  std::vector<int> sites_;
};

// Canonical partition of the chain.
inline Region region_q(const SetupConfig& c) { return Region::range(0, c.l); }
inline Region region_x(const SetupConfig& c) { return Region::range(c.l, c.d); }
inline Region region_p(const SetupConfig& c) { return Region::range(c.l + c.d, c.n_total - c.l - c.d); }
inline Region region_qp(const SetupConfig& c) { return region_q(c).united(region_p(c)); }

}  // namespace qprobe
