#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "partition.hpp"
#include "word.hpp"

namespace ratfn {

inline constexpr std::size_t kDefaultEnumerationBudget = 12;
inline constexpr std::size_t kDefaultSubsetBudget = std::size_t{1} << 20;

// Nondeterministic automaton without epsilon transitions.
class Nfa {
 public:
  Nfa() = default;
  Nfa(std::size_t letters, std::size_t states)
      : letters_(letters), states_(states), succ_(letters * states), initial_(states), final_(states) {}

  std::size_t num_letters() const { return letters_; }
  std::size_t num_states() const { return states_; }

  State add_state() {
    succ_.resize(succ_.size() + letters_);
    initial_.push_back(0);
    final_.push_back(0);
    return static_cast<State>(states_++);
  }

  void add_transition(State p, Letter a, State q) {
    check(p);
    check(q);
    if (a >= letters_) throw PreconditionViolated("letter out of range");
    auto& v = succ_[p * letters_ + a];
    auto it = std::lower_bound(v.begin(), v.end(), q);
    if (it == v.end() || *it != q) v.insert(it, q);
  }
  void set_initial(State q, bool on = true) {
    check(q);
    initial_[q] = on;
  }
  void set_final(State q, bool on = true) {
    check(q);
    final_[q] = on;
  }

  bool is_initial(State q) const { return initial_[q] != 0; }
  bool is_final(State q) const { return final_[q] != 0; }
  const std::vector<State>& successors(State q, Letter a) const { return succ_[q * letters_ + a]; }

  std::vector<State> initials() const { return collect(initial_); }
  std::vector<State> finals() const { return collect(final_); }

  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& v : succ_) n += v.size();
    return n;
  }

  bool accepts(const Word& w) const {
    std::vector<char> cur(initial_.begin(), initial_.end());
    for (Letter a : w) {
      std::vector<char> nxt(states_, 0);
      for (State q = 0; q < states_; ++q) {
        if (!cur[q]) continue;
        for (State p : successors(q, a)) nxt[p] = 1;
      }
      cur.swap(nxt);
    }
    for (State q = 0; q < states_; ++q) {
      if (cur[q] && final_[q]) return true;
    }
    return false;
  }

  bool operator==(const Nfa& o) const {
    return letters_ == o.letters_ && states_ == o.states_ && succ_ == o.succ_ &&
           initial_ == o.initial_ && final_ == o.final_;
  }

 private:
  void check(State q) const {
    if (q >= states_) throw PreconditionViolated("state out of range");
  }
  static std::vector<State> collect(const std::vector<char>& flags) {
    std::vector<State> out;
    for (std::size_t q = 0; q < flags.size(); ++q) {
      if (flags[q]) out.push_back(static_cast<State>(q));
    }
    return out;
  }

  std::size_t letters_ = 0;
  std::size_t states_ = 0;
  std::vector<std::vector<State>> succ_;
  std::vector<char> initial_;
  std::vector<char> final_;
};

enum class Direction { Forward, Backward };

// Complete deterministic automaton. A Forward automaton reads words left to
// right from the initial state. A Backward automaton reads them right to left:
// next(q, a) is the state reached from q on reading a towards the left, and a
// word is accepted when the state reached at its leftmost position is final.
template <Direction D>
class DetAutomaton {
 public:
  static constexpr Direction direction = D;

  DetAutomaton() = default;
  DetAutomaton(std::size_t letters, std::size_t states, State initial = 0)
      : letters_(letters), states_(states), initial_(initial), delta_(letters * states, 0), final_(states, 0) {
    if (states == 0) throw PreconditionViolated("automaton needs at least one state");
    if (initial >= states) throw PreconditionViolated("initial state out of range");
  }

  std::size_t num_letters() const { return letters_; }
  std::size_t num_states() const { return states_; }
  State initial() const { return initial_; }
  State next(State q, Letter a) const { return delta_[q * letters_ + a]; }
  bool is_final(State q) const { return final_[q] != 0; }

  void set_next(State q, Letter a, State p) {
    if (q >= states_ || p >= states_ || a >= letters_) throw PreconditionViolated("transition out of range");
    delta_[q * letters_ + a] = p;
  }
  void set_final(State q, bool on = true) { final_.at(q) = on; }
  void set_initial(State q) {
    if (q >= states_) throw PreconditionViolated("initial state out of range");
    initial_ = q;
  }

  // The state reached from q after reading w in this automaton's direction.
  State read(State q, const Word& w) const {
    if constexpr (D == Direction::Forward) {
      for (Letter a : w) q = next(q, a);
    } else {
      for (auto it = w.rbegin(); it != w.rend(); ++it) q = next(q, *it);
    }
    return q;
  }
  State state_of(const Word& w) const { return read(initial_, w); }
  bool accepts(const Word& w) const { return is_final(state_of(w)); }

  std::vector<State> finals() const {
    std::vector<State> out;
    for (State q = 0; q < states_; ++q) {
      if (final_[q]) out.push_back(q);
    }
    return out;
  }

  bool operator==(const DetAutomaton& o) const {
    return letters_ == o.letters_ && states_ == o.states_ && initial_ == o.initial_ && delta_ == o.delta_ &&
           final_ == o.final_;
  }

 private:
  std::size_t letters_ = 0;
  std::size_t states_ = 0;
  State initial_ = 0;
  std::vector<State> delta_;
  std::vector<char> final_;
};

using LeftAutomaton = DetAutomaton<Direction::Forward>;
using RightAutomaton = DetAutomaton<Direction::Backward>;

template <Direction To, Direction From>
DetAutomaton<To> retag(const DetAutomaton<From>& a) {
  DetAutomaton<To> b(a.num_letters(), a.num_states(), a.initial());
  for (State q = 0; q < a.num_states(); ++q) {
    b.set_final(q, a.is_final(q));
    for (Letter x = 0; x < a.num_letters(); ++x) b.set_next(q, x, a.next(q, x));
  }
  return b;
}

// Breadth-first order of the accessible states, letters in alphabet order.
template <Direction D>
std::vector<State> accessible_order(const DetAutomaton<D>& a) {
  std::vector<State> order{a.initial()};
  std::vector<char> seen(a.num_states(), 0);
  seen[a.initial()] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Letter x = 0; x < a.num_letters(); ++x) {
      State p = a.next(order[i], x);
      if (!seen[p]) {
        seen[p] = 1;
        order.push_back(p);
      }
    }
  }
  return order;
}

// Accessible part renumbered in breadth-first order. `renaming` maps old
// states to new ones (kNoState for inaccessible states).
template <Direction D>
struct Canonical {
  DetAutomaton<D> automaton;
  std::vector<State> renaming;
};

template <Direction D>
Canonical<D> canonical_form(const DetAutomaton<D>& a) {
  auto order = accessible_order(a);
  std::vector<State> ren(a.num_states(), kNoState);
  for (std::size_t i = 0; i < order.size(); ++i) ren[order[i]] = static_cast<State>(i);
  DetAutomaton<D> b(a.num_letters(), order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    b.set_final(static_cast<State>(i), a.is_final(order[i]));
    for (Letter x = 0; x < a.num_letters(); ++x) b.set_next(static_cast<State>(i), x, ren[a.next(order[i], x)]);
  }
  return {std::move(b), std::move(ren)};
}

template <Direction D>
DetAutomaton<D> canonical(const DetAutomaton<D>& a) {
  return canonical_form(a).automaton;
}

// Coarsest partition that refines `start` and is compatible with the
// transitions (Moore refinement).
template <Direction D>
Partition moore_refine(const DetAutomaton<D>& a, Partition start) {
  std::size_t n = a.num_states();
  while (true) {
    std::vector<std::vector<std::uint32_t>> sig(n);
    for (State q = 0; q < n; ++q) {
      sig[q].reserve(a.num_letters() + 1);
      sig[q].push_back(start.block[q]);
      for (Letter x = 0; x < a.num_letters(); ++x) sig[q].push_back(start.block[a.next(q, x)]);
    }
    Partition next = Partition::from_labels(sig);
    if (next.count == start.count) return next;
    start = std::move(next);
  }
}

template <Direction D>
bool is_compatible(const DetAutomaton<D>& a, const Partition& p) {
  std::vector<State> rep(p.count, kNoState);
  for (State q = 0; q < a.num_states(); ++q) {
    if (rep[p.block[q]] == kNoState) rep[p.block[q]] = q;
  }
  for (State q = 0; q < a.num_states(); ++q) {
    State r = rep[p.block[q]];
    if (a.is_final(q) != a.is_final(r)) return false;
    for (Letter x = 0; x < a.num_letters(); ++x) {
      if (p.block[a.next(q, x)] != p.block[a.next(r, x)]) return false;
    }
  }
  return true;
}

// States are the blocks of p.
template <Direction D>
DetAutomaton<D> quotient(const DetAutomaton<D>& a, const Partition& p) {
  if (p.size() != a.num_states() || !is_compatible(a, p)) {
    throw IncompatiblePartition("partition is not compatible with the automaton");
  }
  DetAutomaton<D> b(a.num_letters(), p.count, p.block[a.initial()]);
  for (State q = 0; q < a.num_states(); ++q) {
    b.set_final(p.block[q], a.is_final(q));
    for (Letter x = 0; x < a.num_letters(); ++x) b.set_next(p.block[q], x, p.block[a.next(q, x)]);
  }
  return b;
}

template <Direction D>
DetAutomaton<D> minimize(const DetAutomaton<D>& a) {
  auto c = canonical(a);
  std::vector<char> fin(c.num_states());
  for (State q = 0; q < c.num_states(); ++q) fin[q] = c.is_final(q);
  auto p = moore_refine(c, Partition::from_labels(fin));
  return canonical(quotient(c, p));
}

template <Direction D>
bool iso_equal(const DetAutomaton<D>& a, const DetAutomaton<D>& b) {
  return canonical(a) == canonical(b);
}

// The map sending each accessible state of `fine` to the state of `coarse`
// reached by the same words, if that map is a well-defined morphism.
template <Direction D>
std::optional<std::vector<State>> coarsening_map(const DetAutomaton<D>& fine, const DetAutomaton<D>& coarse) {
  if (fine.num_letters() != coarse.num_letters()) return std::nullopt;
  std::vector<State> map(fine.num_states(), kNoState);
  std::deque<State> queue{fine.initial()};
  map[fine.initial()] = coarse.initial();
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    if (fine.is_final(q) != coarse.is_final(map[q])) return std::nullopt;
    for (Letter x = 0; x < fine.num_letters(); ++x) {
      State p = fine.next(q, x);
      State img = coarse.next(map[q], x);
      if (map[p] == kNoState) {
        map[p] = img;
        queue.push_back(p);
      } else if (map[p] != img) {
        return std::nullopt;
      }
    }
  }
  return map;
}

template <Direction D>
bool refines(const DetAutomaton<D>& fine, const DetAutomaton<D>& coarse) {
  return coarsening_map(fine, coarse).has_value();
}

// Intersection of the languages; the transition congruence is the meet.
template <Direction D>
DetAutomaton<D> product(const DetAutomaton<D>& a, const DetAutomaton<D>& b) {
  if (a.num_letters() != b.num_letters()) throw PreconditionViolated("alphabet mismatch");
  std::map<std::pair<State, State>, State> index;
  std::vector<std::pair<State, State>> states{{a.initial(), b.initial()}};
  index[states[0]] = 0;
  std::vector<State> delta;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (Letter x = 0; x < a.num_letters(); ++x) {
      std::pair<State, State> t{a.next(states[i].first, x), b.next(states[i].second, x)};
      auto [it, inserted] = index.emplace(t, static_cast<State>(states.size()));
      if (inserted) states.push_back(t);
      delta.push_back(it->second);
    }
  }
  DetAutomaton<D> c(a.num_letters(), states.size(), 0);
  for (State q = 0; q < states.size(); ++q) {
    c.set_final(q, a.is_final(states[q].first) && b.is_final(states[q].second));
    for (Letter x = 0; x < a.num_letters(); ++x) c.set_next(q, x, delta[q * a.num_letters() + x]);
  }
  return c;
}

// All partitions of the states of `a` that are compatible with its
// transitions, never merge a final with a non-final state, and refine
// `refine_to` when given. Restricted-growth order, so the output is
// deterministic.
template <Direction D>
std::vector<Partition> enumerate_compatible_quotients(const DetAutomaton<D>& a,
                                                      const std::optional<Partition>& refine_to = std::nullopt,
                                                      std::size_t budget = kDefaultEnumerationBudget) {
  std::size_t n = a.num_states();
  if (n > budget) throw BudgetExceeded("quotient enumeration over " + std::to_string(n) + " states", budget);
  std::vector<Partition> out;
  std::vector<std::uint32_t> assign(n, 0);
  std::vector<State> rep;

  auto consistent = [&](State i) {
    // Pairs whose successors are both assigned must agree.
    for (State j = 0; j < i; ++j) {
      if (assign[j] != assign[i]) continue;
      for (Letter x = 0; x < a.num_letters(); ++x) {
        State p = a.next(i, x), q = a.next(j, x);
        if (p <= i && q <= i && assign[p] != assign[q]) return false;
      }
    }
    return true;
  };

  std::function<void(State)> rec = [&](State i) {
    if (i == n) {
      Partition p;
      p.block = assign;
      p.count = rep.size();
      if (is_compatible(a, p)) out.push_back(std::move(p));
      return;
    }
    for (std::uint32_t b = 0; b <= rep.size(); ++b) {
      if (b < rep.size()) {
        State r = rep[b];
        if (a.is_final(r) != a.is_final(i)) continue;
        if (refine_to && refine_to->block[r] != refine_to->block[i]) continue;
      }
      assign[i] = b;
      bool fresh = b == rep.size();
      if (fresh) rep.push_back(i);
      if (consistent(i)) rec(i + 1);
      if (fresh) rep.pop_back();
    }
  };
  if (n > 0) rec(0);
  return out;
}

// --- conversions between nondeterministic and deterministic forms ---

inline Nfa to_nfa(const LeftAutomaton& a) {
  Nfa n(a.num_letters(), a.num_states());
  n.set_initial(a.initial());
  for (State q = 0; q < a.num_states(); ++q) {
    n.set_final(q, a.is_final(q));
    for (Letter x = 0; x < a.num_letters(); ++x) n.add_transition(q, x, a.next(q, x));
  }
  return n;
}

// Left-to-right NFA for the language of a right automaton: p --a--> q
// whenever the reverse reader steps from q to p on a.
inline Nfa to_nfa(const RightAutomaton& r) {
  Nfa n(r.num_letters(), r.num_states());
  n.set_final(r.initial());
  for (State q = 0; q < r.num_states(); ++q) {
    n.set_initial(q, r.is_final(q));
    for (Letter x = 0; x < r.num_letters(); ++x) n.add_transition(r.next(q, x), x, q);
  }
  return n;
}

namespace detail {

template <class Step>
std::pair<std::vector<std::vector<char>>, std::vector<State>> subset_closure(std::size_t letters,
                                                                            std::vector<char> start, Step step,
                                                                            std::size_t budget) {
  std::map<std::vector<char>, State> index;
  std::vector<std::vector<char>> sets{start};
  index[start] = 0;
  std::vector<State> delta;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (Letter x = 0; x < letters; ++x) {
      auto t = step(sets[i], x);
      auto [it, inserted] = index.emplace(t, static_cast<State>(sets.size()));
      if (inserted) {
        if (sets.size() >= budget) throw BudgetExceeded("subset construction", budget);
        sets.push_back(std::move(t));
      }
      delta.push_back(it->second);
    }
  }
  return {std::move(sets), std::move(delta)};
}

}  // namespace detail

// Accessible subset construction; the empty subset appears as the sink.
inline LeftAutomaton determinize(const Nfa& n, std::size_t budget = kDefaultSubsetBudget) {
  std::vector<char> start(n.num_states(), 0);
  for (State q : n.initials()) start[q] = 1;
  auto step = [&](const std::vector<char>& s, Letter x) {
    std::vector<char> t(n.num_states(), 0);
    for (State q = 0; q < n.num_states(); ++q) {
      if (s[q]) {
        for (State p : n.successors(q, x)) t[p] = 1;
      }
    }
    return t;
  };
  auto [sets, delta] = detail::subset_closure(n.num_letters(), start, step, budget);
  LeftAutomaton a(n.num_letters(), sets.size(), 0);
  for (State i = 0; i < sets.size(); ++i) {
    bool fin = false;
    for (State q = 0; q < n.num_states(); ++q) fin = fin || (sets[i][q] && n.is_final(q));
    a.set_final(i, fin);
    for (Letter x = 0; x < n.num_letters(); ++x) a.set_next(i, x, delta[i * n.num_letters() + x]);
  }
  return a;
}

// Right automaton whose states are the co-reachable sets {q : q --v--> F}.
inline RightAutomaton codeterminize(const Nfa& n, std::size_t budget = kDefaultSubsetBudget) {
  std::vector<char> start(n.num_states(), 0);
  for (State q : n.finals()) start[q] = 1;
  auto step = [&](const std::vector<char>& s, Letter x) {
    std::vector<char> t(n.num_states(), 0);
    for (State q = 0; q < n.num_states(); ++q) {
      for (State p : n.successors(q, x)) {
        if (s[p]) {
          t[q] = 1;
          break;
        }
      }
    }
    return t;
  };
  auto [sets, delta] = detail::subset_closure(n.num_letters(), start, step, budget);
  RightAutomaton r(n.num_letters(), sets.size(), 0);
  for (State i = 0; i < sets.size(); ++i) {
    bool fin = false;
    for (State q = 0; q < n.num_states(); ++q) fin = fin || (sets[i][q] && n.is_initial(q));
    r.set_final(i, fin);
    for (Letter x = 0; x < n.num_letters(); ++x) r.set_next(i, x, delta[i * n.num_letters() + x]);
  }
  return r;
}

// Minimal left automaton for the language read by a right automaton. The
// accessible part reversed and determinized is already minimal, so a budget
// just above `limit` decides whether it can fit in `limit` states.
inline std::optional<LeftAutomaton> forward_language(const RightAutomaton& r, std::size_t limit) {
  try {
    return minimize(determinize(to_nfa(canonical(r)), limit + 1));
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

inline std::optional<RightAutomaton> backward_language(const LeftAutomaton& l, std::size_t limit) {
  try {
    return minimize(codeterminize(to_nfa(canonical(l)), limit + 1));
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

inline bool same_language(const LeftAutomaton& l, const RightAutomaton& r) {
  if (l.num_letters() != r.num_letters()) return false;
  auto ml = minimize(l);
  auto fwd = forward_language(r, ml.num_states());
  return fwd && *fwd == ml;
}

inline bool same_language(const LeftAutomaton& a, const LeftAutomaton& b) { return minimize(a) == minimize(b); }

// Shortest word reaching each accessible state (shortlex among shortest);
// for a right automaton the word is the one read right to left.
template <Direction D>
std::vector<std::optional<Word>> state_representatives(const DetAutomaton<D>& a) {
  std::vector<std::optional<Word>> rep(a.num_states());
  rep[a.initial()] = Word{};
  std::deque<State> queue{a.initial()};
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (Letter x = 0; x < a.num_letters(); ++x) {
      State p = a.next(q, x);
      if (rep[p]) continue;
      Word w = *rep[q];
      if constexpr (D == Direction::Forward) {
        w.push_back(x);
      } else {
        w.insert(w.begin(), x);
      }
      rep[p] = std::move(w);
      queue.push_back(p);
    }
  }
  return rep;
}

template <Direction D>
DetAutomaton<D> universal_automaton(std::size_t letters) {
  DetAutomaton<D> a(letters, 1, 0);
  a.set_final(0);
  for (Letter x = 0; x < letters; ++x) a.set_next(0, x, 0);
  return a;
}

}  // namespace ratfn
