#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "automaton.hpp"
#include "bimachine.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "monoid.hpp"
#include "transducer.hpp"
#include "word.hpp"

namespace ratfn {

// Evidence behind the suffix-class merges of the canonical right automaton.
struct SuffixClassTable {
  std::vector<Word> representatives;  // shortest word of each starting state
  std::vector<std::vector<char>> merged;
  // Pairs rejected because w·u and w·v disagree on the domain for some w.
  std::vector<std::pair<State, State>> domain_split;
  // Pairs rejected for unbounded distance, with a pumping family on w.
  std::vector<std::pair<std::pair<State, State>, PumpWitness>> distance_split;
};

struct CanonicalRight {
  RightAutomaton automaton;
  std::vector<State> projection;  // from the starting right automaton
  SuffixClassTable table;
};

namespace detail {

// The product transducer of b, accepting w when w·u is in the domain and
// producing the part of f(w·u) emitted on w, with the tail as final output.
inline Transducer suffix_rebased(const Bimachine& b, const Transducer& product, const Word& u, State r) {
  std::size_t nr = b.right().num_states();
  Transducer t(product.num_letters(), product.num_states());
  for (const auto& e : product.edges()) t.add_edge(e.from, e.letter, e.to, e.out);
  for (State q = 0; q < product.num_states(); ++q) {
    if (product.is_initial(q)) t.set_initial(q, *product.initial(q));
  }
  for (State l = 0; l < b.left().num_states(); ++l) {
    State end = b.left().read(l, u);
    if (!b.left().is_final(end)) continue;
    t.set_final(static_cast<State>(l * nr + r), concat(omega_word(b, l, u, b.right().initial()), b.rho(end)));
  }
  return t;
}

}  // namespace detail

// Coarsest right automaton of the function realised by `input`: right
// states are merged when their suffixes agree on the domain in every left
// context and keep the output distance bounded.
inline CanonicalRight canonical_right_of(const Bimachine& input) {
  Bimachine b = canonicalize(input);
  std::size_t nr = b.right().num_states();
  auto dom = minimize(b.left());
  auto reps = state_representatives(b.right());
  Transducer product = to_transducer(b);

  CanonicalRight result;
  result.table.merged.assign(nr, std::vector<char>(nr, 0));
  std::vector<Transducer> rebased;
  for (State x = 0; x < nr; ++x) {
    result.table.representatives.push_back(*reps[x]);
    rebased.push_back(detail::suffix_rebased(b, product, *reps[x], x));
  }
  for (State x = 0; x < nr; ++x) {
    result.table.merged[x][x] = 1;
    for (State y = x + 1; y < nr; ++y) {
      bool same_domain = true;
      for (State q = 0; q < dom.num_states() && same_domain; ++q) {
        same_domain = dom.is_final(dom.read(q, *reps[x])) == dom.is_final(dom.read(q, *reps[y]));
      }
      if (!same_domain) {
        result.table.domain_split.emplace_back(x, y);
        continue;
      }
      auto report = analyze_distance(rebased[x], rebased[y]);
      if (report.bounded) {
        result.table.merged[x][y] = result.table.merged[y][x] = 1;
      } else {
        result.table.distance_split.push_back({{x, y}, *report.witness});
      }
    }
  }
  const auto& m = result.table.merged;
  for (State x = 0; x < nr; ++x)
    for (State y = 0; y < nr; ++y)
      for (State z = 0; z < nr; ++z)
        if (m[x][y] && m[y][z] && !m[x][z]) {
          throw TransitivityViolation("suffix classes " + std::to_string(x) + ", " + std::to_string(y) + ", " +
                                      std::to_string(z) + " do not merge transitively");
        }
  std::vector<State> label(nr);
  for (State x = 0; x < nr; ++x) {
    label[x] = x;
    for (State y = 0; y < x; ++y) {
      if (m[x][y]) {
        label[x] = label[y];
        break;
      }
    }
  }
  Partition p = Partition::from_labels(label);
  auto canon = canonical_form(quotient(b.right(), p));
  result.automaton = canon.automaton;
  for (State x = 0; x < nr; ++x) result.projection.push_back(canon.renaming[p.block[x]]);
  return result;
}

inline LeftAutomaton canonical_left_of(const Bimachine& b) {
  return retag<Direction::Forward>(canonical_right_of(mirror(canonicalize(b))).automaton);
}

// Left(R_f): the left minimisation against the canonical right automaton.
inline Bimachine canonical_bimachine_of(const Bimachine& input) {
  Bimachine b = canonicalize(input);
  auto cr = canonical_right_of(b);
  return left_minimize(coarsen_right(b, cr.automaton, cr.projection));
}

// Mirror image: canonical left automaton with its right minimisation.
inline Bimachine cocanonical_bimachine_of(const Bimachine& input) {
  Bimachine m = mirror(canonicalize(input));
  auto cr = canonical_right_of(m);
  return mirror(left_minimize(coarsen_right(m, cr.automaton, cr.projection)));
}

inline Bimachine minimal_from_transducer(const Transducer& t) {
  return minimize_bimachine(transducer_to_bimachine(t));
}

inline RightAutomaton canonical_right_automaton(const Transducer& t) {
  return canonical_right_of(minimal_from_transducer(t)).automaton;
}

inline LeftAutomaton canonical_left_automaton(const Transducer& t) {
  return canonical_left_of(minimal_from_transducer(t));
}

inline Bimachine canonical_bimachine(const Transducer& t) {
  return canonical_bimachine_of(minimal_from_transducer(t));
}

// One representative per ⊟-class of minimal bimachines: right automata R
// between Right(L_f) and R_f recognising the domain, each taken through
// Right(Left(·)) after refining the canonical bimachine onto R.
inline std::vector<Bimachine> minimal_bimachines_of(const Bimachine& input,
                                                    std::size_t budget = kDefaultEnumerationBudget) {
  Bimachine bf = canonical_bimachine_of(input);
  Bimachine low = cocanonical_bimachine_of(input);
  auto proj = coarsening_map(low.right(), bf.right());
  if (!proj) throw Error("right automaton of the canonical left automaton does not refine the canonical one");
  std::vector<Bimachine> out;
  for (const Partition& p : enumerate_compatible_quotients(low.right(), kernel(*proj), budget)) {
    RightAutomaton r = quotient(low.right(), p);
    std::vector<State> pr(p.count);
    for (State x = 0; x < low.right().num_states(); ++x) pr[p.block[x]] = (*proj)[x];
    Bimachine m = right_minimize(left_minimize(refine_right(bf, r, pr)));
    bool seen = false;
    for (const auto& o : out) seen = seen || (o.left() == m.left() && o.right() == m.right());
    if (!seen) out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<Bimachine> minimal_bimachines(const Transducer& t, std::size_t budget = kDefaultEnumerationBudget) {
  return minimal_bimachines_of(minimal_from_transducer(t), budget);
}

inline bool in_class(const Bimachine& b, MonoidClass c) {
  return class_membership(transition_monoid(b.left()), c) && class_membership(transition_monoid(b.right()), c);
}

inline bool is_class_rational_of(const Bimachine& b, MonoidClass c, std::size_t budget = kDefaultEnumerationBudget) {
  if (c == MonoidClass::Finite) return true;
  for (const auto& m : minimal_bimachines_of(b, budget)) {
    if (in_class(m, c)) return true;
  }
  return false;
}

inline bool is_class_rational(const Transducer& t, MonoidClass c, std::size_t budget = kDefaultEnumerationBudget) {
  return is_class_rational_of(minimal_from_transducer(t), c, budget);
}

// The bimachine B_{f,V}: the meet of all class-c quotients of Left(R_f),
// provided it refines the canonical left automaton, with its right
// minimisation. nullopt when the function is not in the class.
inline std::optional<Bimachine> class_bimachine_of(const Bimachine& input, MonoidClass c,
                                                   std::size_t budget = kDefaultEnumerationBudget) {
  Bimachine bf = canonical_bimachine_of(input);
  LeftAutomaton lf = canonical_left_of(input);
  const LeftAutomaton& lr = bf.left();
  std::optional<Partition> meet_v;
  for (const Partition& p : enumerate_compatible_quotients(lr, std::nullopt, budget)) {
    if (!class_membership(transition_monoid(quotient(lr, p)), c)) continue;
    meet_v = meet_v ? meet(*meet_v, p) : p;
  }
  if (!meet_v) return std::nullopt;
  auto to_lf = coarsening_map(lr, lf);
  if (!to_lf) throw Error("Left(R_f) does not refine the canonical left automaton");
  if (!meet_v->refines(kernel(*to_lf))) return std::nullopt;
  auto canon = canonical_form(quotient(lr, *meet_v));
  std::vector<State> proj(lr.num_states());
  for (State q = 0; q < lr.num_states(); ++q) proj[q] = canon.renaming[meet_v->block[q]];
  return right_minimize(coarsen_left(bf, canon.automaton, proj));
}

inline std::optional<Bimachine> class_bimachine(const Transducer& t, MonoidClass c,
                                                std::size_t budget = kDefaultEnumerationBudget) {
  return class_bimachine_of(minimal_from_transducer(t), c, budget);
}

}  // namespace ratfn
