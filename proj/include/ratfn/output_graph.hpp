#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "word.hpp"

namespace ratfn {

// A graph with output labels on its arcs and on exits towards a single
// target. Used to compute, for every vertex, the longest common prefix of
// the labels of all paths to the target.
struct OutputGraph {
  struct Arc {
    std::size_t to;
    Word label;
  };
  std::vector<std::vector<Arc>> arcs;
  std::vector<std::optional<Word>> exit;

  explicit OutputGraph(std::size_t n = 0) : arcs(n), exit(n) {}
  std::size_t size() const { return arcs.size(); }
};

namespace detail {

// |lcp(a, label·b)| without building the concatenation.
inline std::size_t lcp_length_concat(const Word& a, const Word& label, const Word& b) {
  std::size_t i = 0;
  for (; i < a.size() && i < label.size(); ++i) {
    if (a[i] != label[i]) return i;
  }
  if (i < label.size()) return i;
  std::size_t j = 0;
  while (i < a.size() && j < b.size() && a[i] == b[j]) ++i, ++j;
  return i;
}

}  // namespace detail

// nullopt for vertices that cannot reach the target. Starts from the labels
// of a shortest path tree and shrinks by lcp until stable; every value stays
// above the true answer, and a stable assignment is below every path label.
inline std::vector<std::optional<Word>> longest_common_outputs(const OutputGraph& g) {
  std::size_t n = g.size();
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& arc : g.arcs[v]) preds[arc.to].push_back(v);

  std::vector<std::optional<Word>> alpha(n);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.exit[v]) {
      alpha[v] = *g.exit[v];
      queue.push_back(v);
    }
  }
  std::vector<std::size_t> order;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (std::size_t u : preds[v]) {
      if (alpha[u]) continue;
      for (const auto& arc : g.arcs[u]) {
        if (arc.to == v) {
          alpha[u] = concat(arc.label, *alpha[v]);
          break;
        }
      }
      queue.push_back(u);
    }
  }

  std::vector<char> queued(n, 0);
  std::deque<std::size_t> work(order.begin(), order.end());
  for (std::size_t v : order) queued[v] = 1;
  while (!work.empty()) {
    std::size_t v = work.front();
    work.pop_front();
    queued[v] = 0;
    Word& a = *alpha[v];
    std::size_t k = a.size();
    if (g.exit[v]) k = std::min(k, lcp_length(a, *g.exit[v]));
    for (const auto& arc : g.arcs[v]) {
      if (!alpha[arc.to] || k == 0) continue;
      k = std::min(k, detail::lcp_length_concat(a, arc.label, *alpha[arc.to]));
    }
    if (k < a.size()) {
      a.resize(k);
      for (std::size_t u : preds[v]) {
        if (!queued[u] && alpha[u]) {
          queued[u] = 1;
          work.push_back(u);
        }
      }
    }
  }
  return alpha;
}

}  // namespace ratfn
