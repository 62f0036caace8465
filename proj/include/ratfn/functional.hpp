#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "automaton.hpp"
#include "errors.hpp"
#include "transducer.hpp"
#include "word.hpp"

namespace ratfn {

// Synchronised product of two transducers restricted to pairs of states that
// lie on a pair of accepting runs over the same input.
struct PairProduct {
  struct Arc {
    std::size_t from;
    std::size_t to;
    Letter letter;
    Word out1;
    Word out2;
  };
  std::size_t letters = 0;
  std::vector<std::pair<State, State>> states;
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> out_arcs;
  std::vector<std::vector<std::size_t>> in_arcs;
  std::vector<std::optional<std::pair<Word, Word>>> initial;
  std::vector<std::optional<std::pair<Word, Word>>> final;

  std::size_t size() const { return states.size(); }
};

inline PairProduct pair_product(const Transducer& t1, const Transducer& t2) {
  if (t1.num_letters() != t2.num_letters()) throw PreconditionViolated("alphabet mismatch");
  std::map<std::pair<State, State>, std::size_t> index;
  std::vector<std::pair<State, State>> states;
  std::vector<PairProduct::Arc> arcs;
  auto intern = [&](State p, State q) {
    auto [it, inserted] = index.emplace(std::pair{p, q}, states.size());
    if (inserted) states.emplace_back(p, q);
    return it->second;
  };
  for (State p = 0; p < t1.num_states(); ++p)
    for (State q = 0; q < t2.num_states(); ++q)
      if (t1.is_initial(p) && t2.is_initial(q)) intern(p, q);
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [p, q] = states[i];
    for (Letter a = 0; a < t1.num_letters(); ++a) {
      for (std::size_t e1 : t1.edges_from(p, a)) {
        for (std::size_t e2 : t2.edges_from(q, a)) {
          const Edge& x = t1.edges()[e1];
          const Edge& y = t2.edges()[e2];
          std::size_t j = intern(x.to, y.to);
          arcs.push_back({i, j, a, x.out, y.out});
        }
      }
    }
  }
  std::size_t n = states.size();
  std::vector<std::vector<std::size_t>> in(n);
  for (std::size_t k = 0; k < arcs.size(); ++k) in[arcs[k].to].push_back(k);
  std::vector<char> coacc(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (t1.is_final(states[i].first) && t2.is_final(states[i].second)) coacc[i] = 1, queue.push_back(i);
  }
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t k : in[i]) {
      if (!coacc[arcs[k].from]) coacc[arcs[k].from] = 1, queue.push_back(arcs[k].from);
    }
  }

  PairProduct pp;
  pp.letters = t1.num_letters();
  std::vector<std::size_t> ren(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (!coacc[i]) continue;
    ren[i] = pp.states.size();
    pp.states.push_back(states[i]);
  }
  std::size_t m = pp.states.size();
  pp.out_arcs.resize(m);
  pp.in_arcs.resize(m);
  pp.initial.resize(m);
  pp.final.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto [p, q] = pp.states[i];
    if (t1.is_initial(p) && t2.is_initial(q)) pp.initial[i] = std::pair{*t1.initial(p), *t2.initial(q)};
    if (t1.is_final(p) && t2.is_final(q)) pp.final[i] = std::pair{*t1.final_output(p), *t2.final_output(q)};
  }
  for (auto& arc : arcs) {
    if (ren[arc.from] == SIZE_MAX || ren[arc.to] == SIZE_MAX) continue;
    arc.from = ren[arc.from];
    arc.to = ren[arc.to];
    pp.out_arcs[arc.from].push_back(pp.arcs.size());
    pp.in_arcs[arc.to].push_back(pp.arcs.size());
    pp.arcs.push_back(std::move(arc));
  }
  return pp;
}

// A word family prefix · loop^k · suffix.
struct PumpWitness {
  Word prefix;
  Word loop;
  Word suffix;

  Word instance(std::size_t k) const { return concat(prefix, power(loop, k), suffix); }
};

struct PairVerdict {
  bool ok = true;
  std::optional<Word> word;         // equality failures
  std::optional<PumpWitness> pump;  // unbounded distance
};

enum class PairMode { Equality, BoundedDistance };

namespace detail {

inline long long balance(const PairProduct::Arc& a) {
  return static_cast<long long>(a.out1.size()) - static_cast<long long>(a.out2.size());
}

// Strongly connected components (Kosaraju, iterative).
inline std::vector<std::size_t> components(const PairProduct& pp) {
  std::size_t n = pp.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> finish;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < pp.out_arcs[v].size()) {
        std::size_t w = pp.arcs[pp.out_arcs[v][i++]].to;
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        finish.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> comp(n, SIZE_MAX);
  std::size_t c = 0;
  for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
    if (comp[*it] != SIZE_MAX) continue;
    std::vector<std::size_t> stack{*it};
    comp[*it] = c;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t k : pp.in_arcs[v]) {
        std::size_t u = pp.arcs[k].from;
        if (comp[u] == SIZE_MAX) comp[u] = c, stack.push_back(u);
      }
    }
    ++c;
  }
  return comp;
}

// Shortest path of arcs from `from` to `to`, optionally confined to one
// component.
inline std::vector<std::size_t> arc_path(const PairProduct& pp, std::size_t from, std::size_t to,
                                         const std::vector<std::size_t>* comp = nullptr) {
  std::vector<std::size_t> via(pp.size(), SIZE_MAX);
  std::vector<char> seen(pp.size(), 0);
  std::deque<std::size_t> queue{from};
  seen[from] = 1;
  while (!queue.empty() && !seen[to]) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t k : pp.out_arcs[v]) {
      std::size_t w = pp.arcs[k].to;
      if (seen[w] || (comp && (*comp)[w] != (*comp)[from])) continue;
      seen[w] = 1;
      via[w] = k;
      queue.push_back(w);
    }
  }
  std::vector<std::size_t> path;
  if (from == to) return path;
  for (std::size_t v = to; v != from; v = pp.arcs[via[v]].from) path.push_back(via[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

inline Word path_word(const PairProduct& pp, const std::vector<std::size_t>& path) {
  Word w;
  for (std::size_t k : path) w.push_back(pp.arcs[k].letter);
  return w;
}

inline long long path_balance(const PairProduct& pp, const std::vector<std::size_t>& path) {
  long long b = 0;
  for (std::size_t k : path) b += balance(pp.arcs[k]);
  return b;
}

// Shortest initial-to-v path (as arcs) and its starting state.
inline std::pair<std::size_t, std::vector<std::size_t>> path_from_start(const PairProduct& pp, std::size_t v) {
  std::vector<std::size_t> via(pp.size(), SIZE_MAX);
  std::vector<char> seen(pp.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp.initial[i]) seen[i] = 1, queue.push_back(i);
  }
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t k : pp.out_arcs[u]) {
      std::size_t w = pp.arcs[k].to;
      if (!seen[w]) seen[w] = 1, via[w] = k, queue.push_back(w);
    }
  }
  std::vector<std::size_t> path;
  std::size_t u = v;
  while (via[u] != SIZE_MAX) {
    path.push_back(via[u]);
    u = pp.arcs[via[u]].from;
  }
  std::reverse(path.begin(), path.end());
  return {u, path};
}

// Shortest v-to-final path and the final state it ends in.
inline std::pair<std::vector<std::size_t>, std::size_t> path_to_final(const PairProduct& pp, std::size_t v) {
  std::vector<std::size_t> via(pp.size(), SIZE_MAX);
  std::vector<char> seen(pp.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp.final[i]) seen[i] = 1, queue.push_back(i);
  }
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t k : pp.in_arcs[u]) {
      std::size_t w = pp.arcs[k].from;
      if (!seen[w]) seen[w] = 1, via[w] = k, queue.push_back(w);
    }
  }
  std::vector<std::size_t> path;
  std::size_t u = v;
  while (via[u] != SIZE_MAX) {
    path.push_back(via[u]);
    u = pp.arcs[via[u]].to;
  }
  return {path, u};
}

struct Config {
  std::size_t state;
  Word left;
  Word right;
  bool diverged;
  bool operator<(const Config& o) const {
    return std::tie(state, diverged, left, right) < std::tie(o.state, o.diverged, o.left, o.right);
  }
};

}  // namespace detail

// Decides, for two transducers over the same input alphabet, either that the
// two outputs agree on every common input (Equality) or that their prefix
// distance is bounded (BoundedDistance).
//
// Any reachable cycle along which the two output lengths grow at different
// rates is fatal in both modes. Without such a cycle the length difference,
// and hence the delay, is bounded, so the delay-annotated product is finite.
// In BoundedDistance mode a diverged delay stays harmless unless a cycle with
// some output is reachable afterwards.
inline PairVerdict analyze_pair(const PairProduct& pp, PairMode mode) {
  using namespace detail;
  PairVerdict verdict;
  std::size_t n = pp.size();
  if (n == 0) return verdict;
  auto comp = components(pp);

  // Length balance, one potential per component.
  std::vector<long long> h(n, 0);
  std::vector<char> placed(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (placed[root]) continue;
    std::deque<std::size_t> queue{root};
    placed[root] = 1;
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t k : pp.out_arcs[v]) {
        const auto& arc = pp.arcs[k];
        if (comp[arc.to] != comp[root]) continue;
        if (!placed[arc.to]) {
          placed[arc.to] = 1;
          h[arc.to] = h[v] + balance(arc);
          queue.push_back(arc.to);
        } else if (h[arc.to] != h[v] + balance(arc)) {
          // One of two cycles through root is unbalanced.
          auto to_root = arc_path(pp, arc.to, root, &comp);
          auto c1 = arc_path(pp, root, arc.to, &comp);
          c1.insert(c1.end(), to_root.begin(), to_root.end());
          if (path_balance(pp, c1) == 0) {
            c1 = arc_path(pp, root, v, &comp);
            c1.push_back(k);
            c1.insert(c1.end(), to_root.begin(), to_root.end());
          }
          auto [start, pre] = path_from_start(pp, root);
          auto [post, end] = path_to_final(pp, root);
          PumpWitness pump{path_word(pp, pre), path_word(pp, c1), path_word(pp, post)};
          verdict.ok = false;
          if (mode == PairMode::BoundedDistance) {
            verdict.pump = std::move(pump);
          } else {
            long long base = static_cast<long long>(pp.initial[start]->first.size()) -
                             static_cast<long long>(pp.initial[start]->second.size()) + path_balance(pp, pre) +
                             path_balance(pp, post) + static_cast<long long>(pp.final[end]->first.size()) -
                             static_cast<long long>(pp.final[end]->second.size());
            long long d = path_balance(pp, c1);
            verdict.word = pump.instance(base + d != 0 ? 1 : 2);
          }
          return verdict;
        }
      }
    }
  }

  // Delay-annotated exploration.
  std::map<Config, std::size_t> index;
  std::vector<Config> configs;
  std::vector<std::pair<std::size_t, Letter>> parent;
  auto intern = [&](Config c, std::size_t from, Letter a) {
    if (c.diverged) c.left.clear(), c.right.clear();
    auto [it, inserted] = index.emplace(c, configs.size());
    if (inserted) {
      configs.push_back(std::move(c));
      parent.emplace_back(from, a);
    }
    return inserted;
  };
  auto make = [](std::size_t state, Word x, Word y) {
    auto [l, r] = delay(x, y);
    bool div = !l.empty() && !r.empty();
    return Config{state, std::move(l), std::move(r), div};
  };
  auto prefix_of = [&](std::size_t c) {
    Word w;
    while (parent[c].first != SIZE_MAX) {
      w.push_back(parent[c].second);
      c = parent[c].first;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (pp.initial[i]) intern(make(i, pp.initial[i]->first, pp.initial[i]->second), SIZE_MAX, 0);
  }
  std::vector<char> diverged_state(n, 0);
  std::optional<std::size_t> first_diverged;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    Config cur = configs[c];
    if (cur.diverged) {
      if (mode == PairMode::Equality) {
        auto [post, end] = path_to_final(pp, cur.state);
        verdict.ok = false;
        verdict.word = concat(prefix_of(c), path_word(pp, post));
        return verdict;
      }
      if (!first_diverged) first_diverged = c;
      diverged_state[cur.state] = 1;
    }
    if (mode == PairMode::Equality && pp.final[cur.state]) {
      if (concat(cur.left, pp.final[cur.state]->first) != concat(cur.right, pp.final[cur.state]->second)) {
        verdict.ok = false;
        verdict.word = prefix_of(c);
        return verdict;
      }
    }
    for (std::size_t k : pp.out_arcs[cur.state]) {
      const auto& arc = pp.arcs[k];
      Config next = cur.diverged ? Config{arc.to, {}, {}, true}
                                 : make(arc.to, concat(cur.left, arc.out1), concat(cur.right, arc.out2));
      intern(std::move(next), c, arc.letter);
    }
  }
  if (mode == PairMode::Equality || !first_diverged) return verdict;

  // After divergence every further output letter adds to the distance.
  std::vector<char> productive(n, 0);
  for (const auto& arc : pp.arcs) {
    if (comp[arc.from] == comp[arc.to] && (!arc.out1.empty() || !arc.out2.empty())) productive[arc.from] = 1;
  }
  std::vector<std::size_t> via(n, SIZE_MAX);
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (diverged_state[i]) seen[i] = 1, queue.push_back(i);
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    if (productive[v]) {
      std::size_t root = v;
      std::vector<std::size_t> lead;
      while (via[v] != SIZE_MAX) {
        lead.push_back(via[v]);
        v = pp.arcs[via[v]].from;
      }
      std::reverse(lead.begin(), lead.end());
      std::size_t start_config = 0;
      for (std::size_t c = 0; c < configs.size(); ++c) {
        if (configs[c].diverged && configs[c].state == v) {
          start_config = c;
          break;
        }
      }
      std::size_t k = 0;
      for (std::size_t a : pp.out_arcs[root]) {
        const auto& arc = pp.arcs[a];
        if (comp[arc.to] == comp[root] && (!arc.out1.empty() || !arc.out2.empty())) {
          k = a;
          break;
        }
      }
      auto cycle = arc_path(pp, pp.arcs[k].to, root, &comp);
      cycle.insert(cycle.begin(), k);
      auto [post, end] = path_to_final(pp, root);
      verdict.ok = false;
      verdict.pump = PumpWitness{concat(prefix_of(start_config), path_word(pp, lead)), path_word(pp, cycle),
                                 path_word(pp, post)};
      return verdict;
    }
    for (std::size_t k : pp.out_arcs[v]) {
      std::size_t w = pp.arcs[k].to;
      if (!seen[w]) seen[w] = 1, via[w] = k, queue.push_back(w);
    }
  }
  return verdict;
}

struct FunctionalityReport {
  bool functional;
  std::optional<Word> witness;
};

inline FunctionalityReport check_functional(const Transducer& t) {
  auto v = analyze_pair(pair_product(t, t), PairMode::Equality);
  return {v.ok, v.word};
}

inline bool is_functional(const Transducer& t) { return check_functional(t).functional; }

// A shortest word accepted by exactly one of the two automata.
inline std::optional<Word> language_difference(const Nfa& a, const Nfa& b) {
  auto da = determinize(a), db = determinize(b);
  std::map<std::pair<State, State>, Word> seen;
  std::deque<std::pair<State, State>> queue{{da.initial(), db.initial()}};
  seen[queue.front()] = Word{};
  while (!queue.empty()) {
    auto [p, q] = queue.front();
    queue.pop_front();
    const Word w = seen[{p, q}];
    if (da.is_final(p) != db.is_final(q)) return w;
    for (Letter x = 0; x < da.num_letters(); ++x) {
      std::pair<State, State> next{da.next(p, x), db.next(q, x)};
      if (seen.count(next)) continue;
      Word v = w;
      v.push_back(x);
      seen[next] = std::move(v);
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

struct EquivalenceReport {
  bool equivalent;
  std::optional<Word> witness;
};

inline EquivalenceReport check_equivalent(const Transducer& t1, const Transducer& t2) {
  if (t1.num_letters() != t2.num_letters()) throw PreconditionViolated("alphabet mismatch");
  if (!is_functional(t1) || !is_functional(t2)) throw NotFunctionalInput("equivalence needs functional transducers");
  if (auto w = language_difference(t1.underlying(), t2.underlying())) return {false, w};
  auto v = analyze_pair(pair_product(t1, t2), PairMode::Equality);
  return {v.ok, v.word};
}

inline bool equiv_functional(const Transducer& t1, const Transducer& t2) { return check_equivalent(t1, t2).equivalent; }

struct DistanceReport {
  bool bounded;
  std::optional<PumpWitness> witness;
};

// sup over the common domain of the prefix distance between the two outputs.
inline DistanceReport analyze_distance(const Transducer& t1, const Transducer& t2) {
  if (t1.num_letters() != t2.num_letters()) throw PreconditionViolated("alphabet mismatch");
  if (language_difference(t1.underlying(), t2.underlying())) {
    throw PreconditionViolated("bounded distance needs equal domains");
  }
  auto v = analyze_pair(pair_product(t1, t2), PairMode::BoundedDistance);
  return {v.ok, v.pump};
}

inline bool bounded_distance(const Transducer& t1, const Transducer& t2) { return analyze_distance(t1, t2).bounded; }

// Subset construction with delays. Stops with BudgetExceeded when the
// function is not sequential (or just needs more states than allowed).
inline SequentialTransducer determinize_transducer(const Transducer& input, std::size_t budget = kDefaultDelayBudget) {
  if (!is_functional(input)) throw NotFunctionalInput("determinization needs a functional transducer");
  Transducer t = trim(input);
  std::size_t letters = t.num_letters();
  using DelayState = std::vector<std::pair<State, Word>>;

  std::optional<Word> j;
  for (State q = 0; q < t.num_states(); ++q) {
    if (t.is_initial(q)) j = j ? lcp(*j, *t.initial(q)) : *t.initial(q);
  }
  if (!j) return empty_sequential(letters);
  DelayState start;
  for (State q = 0; q < t.num_states(); ++q) {
    if (t.is_initial(q)) start.emplace_back(q, left_quotient(*j, *t.initial(q)));
  }

  std::map<DelayState, State> index;
  std::vector<DelayState> states{start};
  index[start] = 0;
  std::vector<State> delta;
  std::vector<Word> outs;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (Letter a = 0; a < letters; ++a) {
      std::map<State, Word> reach;
      for (const auto& [p, w] : states[i]) {
        for (std::size_t e : t.edges_from(p, a)) {
          const Edge& edge = t.edges()[e];
          Word v = concat(w, edge.out);
          auto [it, inserted] = reach.emplace(edge.to, v);
          if (!inserted && it->second != v) throw NotFunctionalInput("runs disagree on a common prefix");
        }
      }
      Word s;
      bool first = true;
      for (const auto& [q, w] : reach) {
        s = first ? w : lcp(s, w);
        first = false;
      }
      DelayState next;
      for (const auto& [q, w] : reach) next.emplace_back(q, left_quotient(s, w));
      auto [it, inserted] = index.emplace(next, static_cast<State>(states.size()));
      if (inserted) {
        if (states.size() >= budget) throw BudgetExceeded("transducer determinization", budget);
        states.push_back(next);
      }
      delta.push_back(it->second);
      outs.push_back(std::move(s));
    }
  }
  LeftAutomaton a(letters, states.size(), 0);
  SequentialTransducer r;
  for (State i = 0; i < states.size(); ++i) {
    for (Letter x = 0; x < letters; ++x) a.set_next(i, x, delta[i * letters + x]);
  }
  std::vector<Word> fin(states.size());
  for (State i = 0; i < states.size(); ++i) {
    for (const auto& [q, w] : states[i]) {
      if (t.is_final(q)) {
        a.set_final(i);
        fin[i] = concat(w, *t.final_output(q));
        break;
      }
    }
  }
  r = SequentialTransducer(std::move(a));
  r.init_out = *j;
  r.out = std::move(outs);
  r.final_out = std::move(fin);
  return r;
}

// Letterwise annotation by the right state of the strict suffix. The output
// letter for (a, i) is a * states + i, with states numbered canonically.
inline Transducer labelling_transducer(const RightAutomaton& input) {
  RightAutomaton r = canonical(input);
  std::size_t n = r.num_states();
  Transducer t(r.num_letters(), n);
  for (State q = 0; q < n; ++q) {
    if (r.is_final(q)) t.set_initial(q, {});
    for (Letter a = 0; a < r.num_letters(); ++a) {
      t.add_edge(r.next(q, a), a, q, Word{static_cast<Letter>(a * n + q)});
    }
  }
  t.set_final(r.initial(), {});
  return t;
}

inline Alphabet labelling_alphabet(const Alphabet& input, std::size_t states) {
  Alphabet out;
  for (Letter a = 0; a < input.size(); ++a)
    for (std::size_t q = 0; q < states; ++q) out.add(input.name(a) + "@" + std::to_string(q));
  return out;
}

}  // namespace ratfn
