#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "word.hpp"

namespace ratfn {

// A partition of {0..n-1}. Blocks are numbered by first occurrence, so two
// partitions are equal exactly when their block vectors are equal.
struct Partition {
  std::vector<std::uint32_t> block;
  std::size_t count = 0;

  template <class Label>
  static Partition from_labels(const std::vector<Label>& labels) {
    Partition p;
    p.block.resize(labels.size());
    std::map<Label, std::uint32_t> ids;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = ids.emplace(labels[i], static_cast<std::uint32_t>(ids.size()));
      p.block[i] = it->second;
    }
    p.count = ids.size();
    return p;
  }

  static Partition discrete(std::size_t n) {
    Partition p;
    p.block.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.block[i] = static_cast<std::uint32_t>(i);
    p.count = n;
    return p;
  }

  static Partition single(std::size_t n) {
    Partition p;
    p.block.assign(n, 0);
    p.count = n == 0 ? 0 : 1;
    return p;
  }

  std::size_t size() const { return block.size(); }
  bool same(std::size_t i, std::size_t j) const { return block[i] == block[j]; }

  // Every block of *this lies inside a block of coarser.
  bool refines(const Partition& coarser) const {
    std::vector<std::uint32_t> image(count, static_cast<std::uint32_t>(-1));
    for (std::size_t i = 0; i < block.size(); ++i) {
      auto& img = image[block[i]];
      if (img == static_cast<std::uint32_t>(-1)) {
        img = coarser.block[i];
      } else if (img != coarser.block[i]) {
        return false;
      }
    }
    return true;
  }

  std::vector<std::vector<std::uint32_t>> blocks() const {
    std::vector<std::vector<std::uint32_t>> out(count);
    for (std::size_t i = 0; i < block.size(); ++i) {
      out[block[i]].push_back(static_cast<std::uint32_t>(i));
    }
    return out;
  }

  bool operator==(const Partition& o) const { return block == o.block; }
};

inline Partition meet(const Partition& a, const Partition& b) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> labels(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) labels[i] = {a.block[i], b.block[i]};
  return Partition::from_labels(labels);
}

// Kernel of a map given as a vector.
inline Partition kernel(const std::vector<State>& map) { return Partition::from_labels(map); }

}  // namespace ratfn
