#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "automaton.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "monoid.hpp"
#include "output_graph.hpp"
#include "transducer.hpp"
#include "word.hpp"

namespace ratfn {

// <L, R, ω, λ, ρ>. The output on w is λ([w]_R) · ω(l0, w, r0) · ρ([w]_L),
// where the letter at each position is output with the left state of the
// prefix before it and the right state of the suffix after it.
class Bimachine {
 public:
  Bimachine() = default;
  Bimachine(LeftAutomaton left, RightAutomaton right)
      : left_(std::move(left)), right_(std::move(right)),
        out_(left_.num_states() * left_.num_letters() * right_.num_states()), lambda_(right_.num_states()),
        rho_(left_.num_states()) {
    if (left_.num_letters() != right_.num_letters()) throw PreconditionViolated("alphabet mismatch");
  }

  const LeftAutomaton& left() const { return left_; }
  const RightAutomaton& right() const { return right_; }
  std::size_t num_letters() const { return left_.num_letters(); }

  const Word& out(State l, Letter a, State r) const { return out_[index(l, a, r)]; }
  void set_out(State l, Letter a, State r, Word w) { out_[index(l, a, r)] = std::move(w); }
  // λ, indexed by right states.
  const Word& lambda(State r) const { return lambda_[r]; }
  void set_lambda(State r, Word w) { lambda_.at(r) = std::move(w); }
  // ρ, indexed by left states.
  const Word& rho(State l) const { return rho_[l]; }
  void set_rho(State l, Word w) { rho_.at(l) = std::move(w); }

  // Both automata must recognise the same language.
  void validate() const {
    if (!same_language(left_, right_)) {
      throw PreconditionViolated("left and right automata recognise different languages");
    }
  }

  bool operator==(const Bimachine& o) const {
    return left_ == o.left_ && right_ == o.right_ && out_ == o.out_ && lambda_ == o.lambda_ && rho_ == o.rho_;
  }

 private:
  std::size_t index(State l, Letter a, State r) const {
    return (static_cast<std::size_t>(l) * num_letters() + a) * right_.num_states() + r;
  }

  LeftAutomaton left_;
  RightAutomaton right_;
  std::vector<Word> out_;
  std::vector<Word> lambda_;
  std::vector<Word> rho_;
};

inline std::optional<Word> eval(const Bimachine& b, const Word& w) {
  std::size_t n = w.size();
  std::vector<State> rs(n + 1);
  rs[n] = b.right().initial();
  for (std::size_t i = n; i-- > 0;) rs[i] = b.right().next(rs[i + 1], w[i]);
  State l = b.left().initial();
  Word o = b.lambda(rs[0]);
  for (std::size_t i = 0; i < n; ++i) {
    const Word& x = b.out(l, w[i], rs[i + 1]);
    o.insert(o.end(), x.begin(), x.end());
    l = b.left().next(l, w[i]);
  }
  if (!b.left().is_final(l)) return std::nullopt;
  return concat(std::move(o), b.rho(l));
}

// ω(l, u, r): the outputs of the letters of u between left state l and
// right state r.
inline Word omega_word(const Bimachine& b, State l, const Word& u, State r) {
  std::size_t n = u.size();
  std::vector<State> rs(n + 1);
  rs[n] = r;
  for (std::size_t i = n; i-- > 0;) rs[i] = b.right().next(rs[i + 1], u[i]);
  Word o;
  for (std::size_t i = 0; i < n; ++i) {
    const Word& x = b.out(l, u[i], rs[i + 1]);
    o.insert(o.end(), x.begin(), x.end());
    l = b.left().next(l, u[i]);
  }
  return o;
}

inline TransitionMonoid bimachine_monoid(const Bimachine& b, std::size_t budget = kDefaultElementBudget) {
  return pair_monoid(b.left(), b.right(), budget);
}

// Accessible parts of both automata in canonical numbering.
inline Bimachine canonicalize(const Bimachine& b) {
  auto cl = canonical_form(b.left());
  auto cr = canonical_form(b.right());
  Bimachine c(cl.automaton, cr.automaton);
  for (State l = 0; l < b.left().num_states(); ++l) {
    State nl = cl.renaming[l];
    if (nl == kNoState) continue;
    c.set_rho(nl, b.rho(l));
    for (Letter a = 0; a < b.num_letters(); ++a)
      for (State r = 0; r < b.right().num_states(); ++r)
        if (cr.renaming[r] != kNoState) c.set_out(nl, a, cr.renaming[r], b.out(l, a, r));
  }
  for (State r = 0; r < b.right().num_states(); ++r) {
    if (cr.renaming[r] != kNoState) c.set_lambda(cr.renaming[r], b.lambda(r));
  }
  return c;
}

// Left and right exchanged, words reversed: realises w ↦ rev(f(rev(w))).
inline Bimachine mirror(const Bimachine& b) {
  Bimachine m(retag<Direction::Forward>(b.right()), retag<Direction::Backward>(b.left()));
  for (State l = 0; l < b.left().num_states(); ++l) {
    m.set_lambda(l, reversed(b.rho(l)));
    for (Letter a = 0; a < b.num_letters(); ++a)
      for (State r = 0; r < b.right().num_states(); ++r) m.set_out(r, a, l, reversed(b.out(l, a, r)));
  }
  for (State r = 0; r < b.right().num_states(); ++r) m.set_rho(r, reversed(b.lambda(r)));
  return m;
}

// Unambiguous transducer on L × R, state (l, r) numbered l * |R| + r.
inline Transducer to_transducer(const Bimachine& b) {
  std::size_t nl = b.left().num_states(), nr = b.right().num_states();
  Transducer t(b.num_letters(), nl * nr);
  auto id = [nr](State l, State r) { return static_cast<State>(l * nr + r); };
  for (State l = 0; l < nl; ++l) {
    for (Letter a = 0; a < b.num_letters(); ++a) {
      for (State r = 0; r < nr; ++r) {
        t.add_edge(id(l, b.right().next(r, a)), a, id(b.left().next(l, a), r), b.out(l, a, r));
      }
    }
  }
  for (State r = 0; r < nr; ++r) {
    if (b.right().is_final(r)) t.set_initial(id(b.left().initial(), r), b.lambda(r));
  }
  for (State l = 0; l < nl; ++l) {
    if (b.left().is_final(l)) t.set_final(id(l, b.right().initial()), b.rho(l));
  }
  return t;
}

// For each pair (l, r), the longest common prefix of ω(l, x, r0) ρ(l·x)
// over the words x of class r with l·x final; nullopt when there is none.
// Indexed l * |R| + r.
inline std::vector<std::optional<Word>> pair_lcp(const Bimachine& b) {
  std::size_t nl = b.left().num_states(), nr = b.right().num_states();
  OutputGraph g(nl * nr);
  for (State l = 0; l < nl; ++l) {
    if (b.left().is_final(l)) g.exit[l * nr + b.right().initial()] = b.rho(l);
    for (Letter a = 0; a < b.num_letters(); ++a) {
      State l2 = b.left().next(l, a);
      for (State r = 0; r < nr; ++r) {
        g.arcs[l * nr + b.right().next(r, a)].push_back({l2 * nr + r, b.out(l, a, r)});
      }
    }
  }
  return longest_common_outputs(g);
}

// Same automata, outputs produced as early as the right automaton allows.
inline Bimachine earliest_form(const Bimachine& b) {
  std::size_t nl = b.left().num_states(), nr = b.right().num_states();
  auto alpha = pair_lcp(b);
  auto at = [&](State l, State r) -> const std::optional<Word>& { return alpha[l * nr + r]; };
  Bimachine e(b.left(), b.right());
  State l0 = b.left().initial(), r0 = b.right().initial();
  for (State r = 0; r < nr; ++r) {
    if (b.right().is_final(r) && at(l0, r)) e.set_lambda(r, concat(b.lambda(r), *at(l0, r)));
  }
  for (State l = 0; l < nl; ++l) {
    if (b.left().is_final(l)) e.set_rho(l, left_quotient(*at(l, r0), b.rho(l)));
    for (Letter a = 0; a < b.num_letters(); ++a) {
      State l2 = b.left().next(l, a);
      for (State r = 0; r < nr; ++r) {
        if (!at(l2, r)) continue;
        const Word& before = *at(l, b.right().next(r, a));
        e.set_out(l, a, r, left_quotient(before, concat(b.out(l, a, r), *at(l2, r))));
      }
    }
  }
  return e;
}

// Left minimisation with respect to the right automaton.
inline Bimachine left_minimize(const Bimachine& input) {
  Bimachine b = canonicalize(input);
  Bimachine e = earliest_form(b);
  std::size_t nl = b.left().num_states(), nr = b.right().num_states();
  std::vector<std::vector<Word>> labels(nl);
  for (State l = 0; l < nl; ++l) {
    labels[l].push_back(Word{e.left().is_final(l) ? 1u : 0u});
    labels[l].push_back(e.rho(l));
    for (Letter a = 0; a < b.num_letters(); ++a)
      for (State r = 0; r < nr; ++r) labels[l].push_back(e.out(l, a, r));
  }
  Partition p = moore_refine(e.left(), Partition::from_labels(labels));
  Bimachine m(quotient(e.left(), p), e.right());
  std::vector<char> done(p.count, 0);
  for (State l = 0; l < nl; ++l) {
    State k = p.block[l];
    if (done[k]) continue;
    done[k] = 1;
    m.set_rho(k, e.rho(l));
    for (Letter a = 0; a < b.num_letters(); ++a)
      for (State r = 0; r < nr; ++r) m.set_out(k, a, r, e.out(l, a, r));
  }
  for (State r = 0; r < nr; ++r) m.set_lambda(r, e.lambda(r));
  return canonicalize(m);
}

inline Bimachine right_minimize(const Bimachine& b) { return mirror(left_minimize(mirror(b))); }

inline Bimachine minimize_bimachine(const Bimachine& b) { return right_minimize(left_minimize(b)); }

// Same automata up to isomorphism and the same function.
inline bool boxminus_equal(const Bimachine& a, const Bimachine& b) {
  return iso_equal(a.left(), b.left()) && iso_equal(a.right(), b.right()) &&
         equiv_functional(to_transducer(a), to_transducer(b));
}

namespace detail {

template <Direction D>
void check_morphism(const DetAutomaton<D>& fine, const DetAutomaton<D>& coarse, const std::vector<State>& proj) {
  if (proj.size() != fine.num_states()) throw IncompatibleMorphism("projection has the wrong size");
  if (proj[fine.initial()] != coarse.initial()) throw IncompatibleMorphism("projection moves the initial state");
  for (State q = 0; q < fine.num_states(); ++q) {
    if (proj[q] >= coarse.num_states()) throw IncompatibleMorphism("projection out of range");
    if (fine.is_final(q) != coarse.is_final(proj[q])) throw IncompatibleMorphism("projection breaks finality");
    for (Letter a = 0; a < fine.num_letters(); ++a) {
      if (proj[fine.next(q, a)] != coarse.next(proj[q], a)) {
        throw IncompatibleMorphism("projection does not commute with transitions");
      }
    }
  }
}

}  // namespace detail

// Same left automaton and function, over a finer right automaton r that
// projects onto b's right automaton.
inline Bimachine refine_right(const Bimachine& b, const RightAutomaton& r, const std::vector<State>& proj) {
  detail::check_morphism(r, b.right(), proj);
  Bimachine m(b.left(), r);
  for (State x = 0; x < r.num_states(); ++x) {
    m.set_lambda(x, b.lambda(proj[x]));
    for (State l = 0; l < b.left().num_states(); ++l)
      for (Letter a = 0; a < b.num_letters(); ++a) m.set_out(l, a, x, b.out(l, a, proj[x]));
  }
  for (State l = 0; l < b.left().num_states(); ++l) m.set_rho(l, b.rho(l));
  return m;
}

inline Bimachine refine_left(const Bimachine& b, const LeftAutomaton& l, const std::vector<State>& proj) {
  return mirror(refine_right(mirror(b), retag<Direction::Backward>(l), proj));
}

// The same function over a coarser right automaton `coarse`, onto which b's
// right automaton projects. Left states pair a state of b with the pending
// residual of each live right state; this terminates when some bimachine
// with right automaton `coarse` realises the function, and otherwise runs
// into the budget.
inline Bimachine coarsen_right(const Bimachine& input, const RightAutomaton& coarse, const std::vector<State>& proj,
                               std::size_t budget = kDefaultDelayBudget) {
  Bimachine b = canonicalize(input);
  if (proj.size() != input.right().num_states()) throw IncompatibleMorphism("projection has the wrong size");
  auto cr = canonical_form(input.right());
  std::vector<State> pr(b.right().num_states());
  for (State r = 0; r < input.right().num_states(); ++r) {
    if (cr.renaming[r] != kNoState) pr[cr.renaming[r]] = proj[r];
  }
  detail::check_morphism(b.right(), coarse, pr);

  Bimachine e = earliest_form(b);
  auto alpha = pair_lcp(b);
  std::size_t nr = b.right().num_states(), letters = b.num_letters();
  auto live = [&](State l, State r) { return alpha[l * nr + r].has_value(); };
  using Residuals = std::vector<std::optional<Word>>;
  using Key = std::pair<State, Residuals>;

  std::vector<std::optional<Word>> lambda2(coarse.num_states());
  for (State r = 0; r < nr; ++r) {
    if (!b.right().is_final(r)) continue;
    auto& x = lambda2[pr[r]];
    x = x ? lcp(*x, e.lambda(r)) : e.lambda(r);
  }
  Residuals start(nr);
  for (State r = 0; r < nr; ++r) {
    if (b.right().is_final(r)) start[r] = left_quotient(*lambda2[pr[r]], e.lambda(r));
  }

  std::map<Key, State> index;
  std::vector<Key> states{{b.left().initial(), start}};
  index[states[0]] = 0;
  std::vector<State> delta;
  std::vector<std::vector<Word>> outs;  // per state and letter: one word per coarse state
  for (std::size_t i = 0; i < states.size(); ++i) {
    State l = states[i].first;
    for (Letter a = 0; a < letters; ++a) {
      State l2 = b.left().next(l, a);
      std::vector<std::optional<Word>> lcp2(coarse.num_states());
      Residuals next(nr);
      for (State r = 0; r < nr; ++r) {
        if (!live(l2, r)) continue;
        Word x = concat(*states[i].second[b.right().next(r, a)], e.out(l, a, r));
        auto& c = lcp2[pr[r]];
        c = c ? lcp(*c, x) : x;
        next[r] = std::move(x);
      }
      for (State r = 0; r < nr; ++r) {
        if (next[r]) next[r] = left_quotient(*lcp2[pr[r]], *next[r]);
      }
      std::vector<Word> o(coarse.num_states());
      for (State c = 0; c < coarse.num_states(); ++c) {
        if (lcp2[c]) o[c] = *lcp2[c];
      }
      outs.push_back(std::move(o));
      Key key{l2, std::move(next)};
      auto [it, inserted] = index.emplace(key, static_cast<State>(states.size()));
      if (inserted) {
        if (states.size() >= budget) throw BudgetExceeded("right automaton coarsening", budget);
        states.push_back(std::move(key));
      }
      delta.push_back(it->second);
    }
  }

  LeftAutomaton left(letters, states.size(), 0);
  for (State i = 0; i < states.size(); ++i) {
    left.set_final(i, b.left().is_final(states[i].first));
    for (Letter a = 0; a < letters; ++a) left.set_next(i, a, delta[i * letters + a]);
  }
  Bimachine m(std::move(left), coarse);
  for (State i = 0; i < states.size(); ++i) {
    State l = states[i].first;
    if (b.left().is_final(l)) m.set_rho(i, concat(*states[i].second[b.right().initial()], e.rho(l)));
    for (Letter a = 0; a < letters; ++a)
      for (State c = 0; c < coarse.num_states(); ++c) m.set_out(i, a, c, outs[i * letters + a][c]);
  }
  for (State c = 0; c < coarse.num_states(); ++c) {
    if (lambda2[c]) m.set_lambda(c, *lambda2[c]);
  }
  return m;
}

inline Bimachine coarsen_left(const Bimachine& b, const LeftAutomaton& coarse, const std::vector<State>& proj,
                              std::size_t budget = kDefaultDelayBudget) {
  return mirror(coarsen_right(mirror(b), retag<Direction::Backward>(coarse), proj, budget));
}

// Bimachine for a functional transducer whose right automaton is the suffix
// congruence of the transition monoid of the underlying automaton. The left
// automaton follows, for every possible set of states able to finish on the
// suffix, the lexicographically least accepting run; it is then minimised.
inline Bimachine transducer_to_bimachine(const Transducer& t, std::size_t element_budget = kDefaultElementBudget,
                                         std::size_t budget = kDefaultSubsetBudget) {
  if (!is_functional(t)) throw NotFunctionalInput("transducer is not functional");
  std::size_t letters = t.num_letters(), nq = t.num_states();
  Nfa a = t.underlying();
  TransitionMonoid mon = transition_monoid(a, element_budget);
  std::size_t nm = mon.size();

  RightAutomaton right(letters, nm, mon.identity());
  std::vector<std::vector<char>> co(nm, std::vector<char>(nq, 0));
  for (Element m = 0; m < nm; ++m) {
    const BoolMatrix& x = mon.matrix(m);
    bool fin = false;
    for (State p = 0; p < nq; ++p) {
      for (State q = 0; q < nq; ++q) {
        if (!x.get(p, q) || !t.is_final(q)) continue;
        co[m][p] = 1;
        fin = fin || t.is_initial(p);
      }
    }
    right.set_final(m, fin);
    for (Letter c = 0; c < letters; ++c) right.set_next(m, c, mon.left_act(c, m));
  }

  // Distinct co-reachable sets and how letters act on them.
  std::map<std::vector<char>, std::size_t> set_index;
  std::vector<std::size_t> set_of(nm);
  std::vector<std::vector<char>> sets;
  for (Element m = 0; m < nm; ++m) {
    auto [it, inserted] = set_index.emplace(co[m], sets.size());
    if (inserted) sets.push_back(co[m]);
    set_of[m] = it->second;
  }
  std::size_t ns = sets.size();
  std::vector<std::size_t> pre(ns * letters);
  for (Element m = 0; m < nm; ++m)
    for (Letter c = 0; c < letters; ++c) pre[set_of[m] * letters + c] = set_of[mon.left_act(c, m)];
  std::size_t final_set = set_of[mon.identity()];

  auto edge_out = [&](State p, Letter c, State q) -> const Word& {
    for (std::size_t e : t.edges_from(p, c)) {
      if (t.edges()[e].to == q) return t.edges()[e].out;
    }
    throw Error("missing transition");
  };

  using Choice = std::vector<State>;
  Choice start(ns, kNoState);
  for (std::size_t s = 0; s < ns; ++s) {
    for (State q = 0; q < nq; ++q) {
      if (t.is_initial(q) && sets[s][q]) {
        start[s] = q;
        break;
      }
    }
  }
  auto step = [&](const Choice& phi, Letter c) {
    Choice next(ns, kNoState);
    for (std::size_t s = 0; s < ns; ++s) {
      State p = phi[pre[s * letters + c]];
      if (p == kNoState) continue;
      for (State q = 0; q < nq; ++q) {
        if (!sets[s][q]) continue;
        bool edge = false;
        for (std::size_t e : t.edges_from(p, c)) edge = edge || t.edges()[e].to == q;
        if (edge) {
          next[s] = q;
          break;
        }
      }
    }
    return next;
  };
  std::map<Choice, State> index;
  std::vector<Choice> choices{start};
  index[start] = 0;
  std::vector<State> delta;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    for (Letter c = 0; c < letters; ++c) {
      Choice next = step(choices[i], c);
      auto [it, inserted] = index.emplace(next, static_cast<State>(choices.size()));
      if (inserted) {
        if (choices.size() >= budget) throw BudgetExceeded("run selection automaton", budget);
        choices.push_back(std::move(next));
      }
      delta.push_back(it->second);
    }
  }
  LeftAutomaton left(letters, choices.size(), 0);
  for (State i = 0; i < choices.size(); ++i) {
    left.set_final(i, choices[i][final_set] != kNoState);
    for (Letter c = 0; c < letters; ++c) left.set_next(i, c, delta[i * letters + c]);
  }
  Bimachine b(std::move(left), std::move(right));
  for (State i = 0; i < choices.size(); ++i) {
    const Choice& phi = choices[i];
    if (phi[final_set] != kNoState) b.set_rho(i, *t.final_output(phi[final_set]));
    for (Letter c = 0; c < letters; ++c) {
      const Choice& next = choices[delta[i * letters + c]];
      for (Element m = 0; m < nm; ++m) {
        std::size_t s = set_of[m];
        State p = phi[pre[s * letters + c]];
        if (p == kNoState || next[s] == kNoState) continue;
        b.set_out(i, c, m, edge_out(p, c, next[s]));
      }
    }
  }
  for (Element m = 0; m < nm; ++m) {
    if (b.right().is_final(m)) b.set_lambda(m, *t.initial(start[set_of[m]]));
  }
  return left_minimize(b);
}

// Bimachine whose output on w is the run of the complete automaton `a`
// on w, one letter per visited state. Output letter q is state q.
inline Bimachine run_output_bimachine(const LeftAutomaton& a) {
  LeftAutomaton left = a;
  for (State q = 0; q < left.num_states(); ++q) left.set_final(q);
  Bimachine b(left, universal_automaton<Direction::Backward>(a.num_letters()));
  for (State q = 0; q < a.num_states(); ++q) {
    b.set_rho(q, Word{q});
    for (Letter c = 0; c < a.num_letters(); ++c) b.set_out(q, c, 0, Word{q});
  }
  return b;
}

inline LeftAutomaton require_complete_deterministic(const Nfa& n) {
  auto init = n.initials();
  if (init.size() != 1) throw NotComplete("automaton needs exactly one initial state");
  LeftAutomaton a(n.num_letters(), n.num_states(), init[0]);
  for (State q = 0; q < n.num_states(); ++q) {
    a.set_final(q, n.is_final(q));
    for (Letter c = 0; c < n.num_letters(); ++c) {
      const auto& s = n.successors(q, c);
      if (s.size() != 1) throw NotComplete("state " + std::to_string(q) + " is not complete and deterministic");
      a.set_next(q, c, s[0]);
    }
  }
  return a;
}

inline Bimachine run_output_bimachine(const Nfa& n) { return run_output_bimachine(require_complete_deterministic(n)); }

inline Alphabet run_output_alphabet(std::size_t states) {
  Alphabet out;
  for (std::size_t q = 0; q < states; ++q) out.add("q" + std::to_string(q));
  return out;
}

inline bool is_aperiodic_function(const Bimachine& b) {
  return is_aperiodic(bimachine_monoid(minimize_bimachine(b)));
}

}  // namespace ratfn
