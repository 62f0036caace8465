#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "automaton.hpp"
#include "errors.hpp"
#include "monoid.hpp"
#include "output_graph.hpp"
#include "word.hpp"

namespace ratfn {

inline constexpr std::size_t kDefaultDelayBudget = 4096;

struct Edge {
  State from;
  Letter letter;
  State to;
  Word out;
};

// Real-time transducer <A, out, init, final>. A state is initial (final)
// exactly when it carries an initial (final) output.
class Transducer {
 public:
  Transducer() = default;
  Transducer(std::size_t letters, std::size_t states)
      : letters_(letters), initial_(states), final_(states), adj_(states * letters) {}

  std::size_t num_letters() const { return letters_; }
  std::size_t num_states() const { return initial_.size(); }

  State add_state() {
    initial_.emplace_back();
    final_.emplace_back();
    adj_.resize(adj_.size() + letters_);
    return static_cast<State>(initial_.size() - 1);
  }

  void add_edge(State p, Letter a, State q, Word out = {}) {
    if (p >= num_states() || q >= num_states() || a >= letters_) throw PreconditionViolated("edge out of range");
    for (std::size_t i : adj_[p * letters_ + a]) {
      if (edges_[i].to == q) {
        if (edges_[i].out != out) throw PreconditionViolated("two outputs on the same transition");
        return;
      }
    }
    adj_[p * letters_ + a].push_back(edges_.size());
    edges_.push_back({p, a, q, std::move(out)});
  }
  void set_initial(State q, Word out = {}) { initial_.at(q) = std::move(out); }
  void set_final(State q, Word out = {}) { final_.at(q) = std::move(out); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<Word>& initial(State q) const { return initial_[q]; }
  const std::optional<Word>& final_output(State q) const { return final_[q]; }
  bool is_initial(State q) const { return initial_[q].has_value(); }
  bool is_final(State q) const { return final_[q].has_value(); }

  // Indices into edges() leaving p on a.
  const std::vector<std::size_t>& edges_from(State p, Letter a) const { return adj_[p * letters_ + a]; }

  Nfa underlying() const {
    Nfa n(letters_, num_states());
    for (State q = 0; q < num_states(); ++q) {
      n.set_initial(q, is_initial(q));
      n.set_final(q, is_final(q));
    }
    for (const auto& e : edges_) n.add_transition(e.from, e.letter, e.to);
    return n;
  }

  std::size_t max_edge_output() const {
    std::size_t m = 0;
    for (const auto& e : edges_) m = std::max(m, e.out.size());
    return m;
  }
  std::size_t max_end_output() const {
    std::size_t m = 0;
    for (State q = 0; q < num_states(); ++q) {
      if (initial_[q]) m = std::max(m, initial_[q]->size());
      if (final_[q]) m = std::max(m, final_[q]->size());
    }
    return m;
  }

 private:
  std::size_t letters_ = 0;
  std::vector<std::optional<Word>> initial_;
  std::vector<std::optional<Word>> final_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

// Deterministic transducer on a complete left automaton. Outputs of
// non-final states' final output are ignored.
struct SequentialTransducer {
  LeftAutomaton automaton;
  Word init_out;
  std::vector<Word> out;        // state * letters + letter
  std::vector<Word> final_out;  // per state

  SequentialTransducer() = default;
  explicit SequentialTransducer(LeftAutomaton a)
      : automaton(std::move(a)), out(automaton.num_states() * automaton.num_letters()),
        final_out(automaton.num_states()) {}

  std::size_t num_states() const { return automaton.num_states(); }
  std::size_t num_letters() const { return automaton.num_letters(); }
  const Word& output(State q, Letter a) const { return out[q * num_letters() + a]; }
  void set_output(State q, Letter a, Word w) { out[q * num_letters() + a] = std::move(w); }

  bool operator==(const SequentialTransducer& o) const {
    return automaton == o.automaton && init_out == o.init_out && out == o.out && final_out == o.final_out;
  }
};

inline Transducer to_transducer(const SequentialTransducer& s) {
  Transducer t(s.num_letters(), s.num_states());
  t.set_initial(s.automaton.initial(), s.init_out);
  for (State q = 0; q < s.num_states(); ++q) {
    if (s.automaton.is_final(q)) t.set_final(q, s.final_out[q]);
    for (Letter a = 0; a < s.num_letters(); ++a) t.add_edge(q, a, s.automaton.next(q, a), s.output(q, a));
  }
  return t;
}

struct NotInDomain {
  bool operator==(const NotInDomain&) const = default;
};
struct NotFunctionalWitness {
  Word first;
  Word second;
  bool operator==(const NotFunctionalWitness&) const = default;
};
using EvalResult = std::variant<Word, NotInDomain, NotFunctionalWitness>;

inline const Word* value_of(const EvalResult& r) { return std::get_if<Word>(&r); }

// Runs are followed forward among the states that can still finish on the
// rest of the input. Two different outputs at one such state already prove
// that the transducer is not functional.
inline EvalResult eval(const Transducer& t, const Word& w) {
  std::size_t n = w.size(), m = t.num_states();
  std::vector<std::vector<char>> live(n + 1, std::vector<char>(m, 0));
  for (State q = 0; q < m; ++q) live[n][q] = t.is_final(q);
  for (std::size_t i = n; i-- > 0;) {
    for (State q = 0; q < m; ++q) {
      for (std::size_t e : t.edges_from(q, w[i])) {
        if (live[i + 1][t.edges()[e].to]) {
          live[i][q] = 1;
          break;
        }
      }
    }
  }
  std::vector<std::optional<Word>> cur(m);
  for (State q = 0; q < m; ++q) {
    if (t.is_initial(q) && live[0][q]) cur[q] = *t.initial(q);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::optional<Word>> nxt(m);
    for (State q = 0; q < m; ++q) {
      if (!cur[q]) continue;
      for (std::size_t e : t.edges_from(q, w[i])) {
        const Edge& edge = t.edges()[e];
        if (!live[i + 1][edge.to]) continue;
        Word o = concat(*cur[q], edge.out);
        if (!nxt[edge.to]) {
          nxt[edge.to] = std::move(o);
        } else if (*nxt[edge.to] != o) {
          return NotFunctionalWitness{*nxt[edge.to], o};
        }
      }
    }
    cur.swap(nxt);
  }
  std::optional<Word> result;
  for (State q = 0; q < m; ++q) {
    if (!cur[q] || !t.is_final(q)) continue;
    Word o = concat(*cur[q], *t.final_output(q));
    if (!result) {
      result = std::move(o);
    } else if (*result != o) {
      return NotFunctionalWitness{*result, o};
    }
  }
  if (!result) return NotInDomain{};
  return *result;
}

inline EvalResult eval(const SequentialTransducer& s, const Word& w) {
  State q = s.automaton.initial();
  Word o = s.init_out;
  for (Letter a : w) {
    const Word& x = s.output(q, a);
    o.insert(o.end(), x.begin(), x.end());
    q = s.automaton.next(q, a);
  }
  if (!s.automaton.is_final(q)) return NotInDomain{};
  return concat(std::move(o), s.final_out[q]);
}

// Restriction to states that are both accessible and co-accessible.
inline Transducer trim(const Transducer& t) {
  std::size_t m = t.num_states();
  std::vector<char> acc(m, 0), coacc(m, 0);
  std::deque<State> queue;
  for (State q = 0; q < m; ++q) {
    if (t.is_initial(q)) acc[q] = 1, queue.push_back(q);
  }
  std::vector<std::vector<State>> preds(m);
  for (const auto& e : t.edges()) preds[e.to].push_back(e.from);
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (Letter a = 0; a < t.num_letters(); ++a) {
      for (std::size_t e : t.edges_from(q, a)) {
        State p = t.edges()[e].to;
        if (!acc[p]) acc[p] = 1, queue.push_back(p);
      }
    }
  }
  for (State q = 0; q < m; ++q) {
    if (t.is_final(q)) coacc[q] = 1, queue.push_back(q);
  }
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (State p : preds[q]) {
      if (!coacc[p]) coacc[p] = 1, queue.push_back(p);
    }
  }
  std::vector<State> ren(m, kNoState);
  std::size_t k = 0;
  for (State q = 0; q < m; ++q) {
    if (acc[q] && coacc[q]) ren[q] = static_cast<State>(k++);
  }
  Transducer r(t.num_letters(), k);
  for (State q = 0; q < m; ++q) {
    if (ren[q] == kNoState) continue;
    if (t.is_initial(q)) r.set_initial(ren[q], *t.initial(q));
    if (t.is_final(q)) r.set_final(ren[q], *t.final_output(q));
  }
  for (const auto& e : t.edges()) {
    if (ren[e.from] != kNoState && ren[e.to] != kNoState) r.add_edge(ren[e.from], e.letter, ren[e.to], e.out);
  }
  return r;
}

// For each state, the longest common prefix of the outputs of all accepting
// continuations; nullopt for states that cannot reach acceptance.
inline std::vector<std::optional<Word>> universal_lcp_to_accept(const SequentialTransducer& s) {
  OutputGraph g(s.num_states());
  for (State q = 0; q < s.num_states(); ++q) {
    if (s.automaton.is_final(q)) g.exit[q] = s.final_out[q];
    for (Letter a = 0; a < s.num_letters(); ++a) g.arcs[q].push_back({s.automaton.next(q, a), s.output(q, a)});
  }
  return longest_common_outputs(g);
}

inline Word lcp_to_accept(const SequentialTransducer& s, State q) {
  auto alpha = universal_lcp_to_accept(s);
  if (!alpha.at(q)) throw NotCoaccessible("state " + std::to_string(q) + " has no accepting continuation");
  return *alpha[q];
}

inline SequentialTransducer empty_sequential(std::size_t letters) {
  LeftAutomaton a(letters, 1, 0);
  for (Letter x = 0; x < letters; ++x) a.set_next(0, x, 0);
  return SequentialTransducer(std::move(a));
}

// Outputs pushed towards the initial state, then equivalent states merged and
// the result renumbered canonically.
inline SequentialTransducer minimize_sequential(const SequentialTransducer& s) {
  std::size_t letters = s.num_letters();
  auto alpha = universal_lcp_to_accept(s);
  State q0 = s.automaton.initial();
  if (!alpha[q0]) return empty_sequential(letters);

  // Live states keep their index; one extra sink absorbs the rest.
  std::size_t n = s.num_states();
  State sink = static_cast<State>(n);
  LeftAutomaton a(letters, n + 1, q0);
  std::vector<Word> out((n + 1) * letters), fin(n + 1);
  for (Letter x = 0; x < letters; ++x) a.set_next(sink, x, sink);
  for (State q = 0; q < n; ++q) {
    for (Letter x = 0; x < letters; ++x) a.set_next(q, x, sink);
    if (!alpha[q]) continue;
    if (s.automaton.is_final(q)) {
      a.set_final(q);
      fin[q] = left_quotient(*alpha[q], s.final_out[q]);
    }
    for (Letter x = 0; x < letters; ++x) {
      State p = s.automaton.next(q, x);
      if (!alpha[p]) continue;
      a.set_next(q, x, p);
      out[q * letters + x] = left_quotient(*alpha[q], concat(s.output(q, x), *alpha[p]));
    }
  }

  std::vector<std::vector<Word>> labels(n + 1);
  for (State q = 0; q <= n; ++q) {
    bool live = q < n && alpha[q];
    labels[q].push_back(Word{live ? 1u : 0u, a.is_final(q) ? 1u : 0u});
    labels[q].push_back(fin[q]);
    for (Letter x = 0; x < letters; ++x) labels[q].push_back(out[q * letters + x]);
  }
  Partition p = moore_refine(a, Partition::from_labels(labels));
  auto quot = quotient(a, p);
  std::vector<State> rep(p.count, kNoState);
  for (State q = 0; q <= n; ++q) {
    if (rep[p.block[q]] == kNoState) rep[p.block[q]] = q;
  }
  auto canon = canonical_form(quot);
  SequentialTransducer r(canon.automaton);
  r.init_out = concat(s.init_out, *alpha[q0]);
  for (State b = 0; b < p.count; ++b) {
    State nb = canon.renaming[b];
    if (nb == kNoState) continue;
    r.final_out[nb] = fin[rep[b]];
    for (Letter x = 0; x < letters; ++x) r.set_output(nb, x, out[rep[b] * letters + x]);
  }
  return r;
}

inline bool is_class_sequential(const SequentialTransducer& s, MonoidClass c) {
  return class_membership(transition_monoid(minimize_sequential(s).automaton), c);
}

}  // namespace ratfn
