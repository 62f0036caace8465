#pragma once

// Reference implementations and random machines shared by the test programs.
// The oracles work from the definitions only: runs are enumerated, states are
// recomputed from scratch, and surjections are found by exhaustive pairing.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ratfn/ratfn.hpp"

#ifndef RATFN_FIXTURE_DIR
#define RATFN_FIXTURE_DIR "fixtures"
#endif

namespace ratfn::testing {

using Rng = std::mt19937;

inline std::string fixture_path(const std::string& name) { return std::string(RATFN_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

inline MachineDocument load_fixture(const std::string& name) { return parse_machine(read_file(fixture_path(name))); }

inline const std::vector<std::string>& function_fixtures() {
  static const std::vector<std::string> names{"fig1.ft", "fig2.bm", "last_to_front.ft", "ends_with_b.ft",
                                              "odd_length.ft", "even_a_gadget.bm", "contains_a_gadget.bm"};
  return names;
}

inline const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> names{"fig1.ft",        "fig2.bm",         "last_to_front.ft",
                                              "ends_with_b.ft", "odd_length.ft",   "even_a_gadget.bm",
                                              "contains_a_gadget.bm", "even_a.dfa", "contains_a.dfa",
                                              "last_letter.rdfa"};
  return names;
}

inline Transducer fixture_transducer(const MachineDocument& d) {
  if (auto* t = d.get<Transducer>()) return *t;
  if (auto* s = d.get<SequentialTransducer>()) return to_transducer(*s);
  return to_transducer(std::get<Bimachine>(d.machine));
}

// ---- oracles --------------------------------------------------------------

// Every output of an accepting run on w.
inline std::set<Word> run_outputs(const Transducer& t, const Word& w) {
  std::set<std::pair<State, Word>> cur;
  for (State q = 0; q < t.num_states(); ++q) {
    if (t.is_initial(q)) cur.insert({q, *t.initial(q)});
  }
  for (Letter a : w) {
    std::set<std::pair<State, Word>> nxt;
    for (const auto& [q, o] : cur) {
      for (const Edge& e : t.edges()) {
        if (e.from == q && e.letter == a) nxt.insert({e.to, concat(o, e.out)});
      }
    }
    cur.swap(nxt);
  }
  std::set<Word> out;
  for (const auto& [q, o] : cur) {
    if (t.is_final(q)) out.insert(concat(o, *t.final_output(q)));
  }
  return out;
}

inline std::optional<Word> brute_eval(const Transducer& t, const Word& w) {
  auto outs = run_outputs(t, w);
  if (outs.size() > 1) throw NotFunctionalInput("oracle: several outputs");
  if (outs.empty()) return std::nullopt;
  return *outs.begin();
}

inline bool brute_functional(const Transducer& t, std::size_t max_len) {
  for (const Word& w : words_up_to(t.num_letters(), max_len)) {
    if (run_outputs(t, w).size() > 1) return false;
  }
  return true;
}

// f(w) from the definition: λ of the right state of w, then one ω per
// position with the left state of the prefix and the right state of the
// strict suffix, then ρ of the left state of w.
inline std::optional<Word> brute_eval(const Bimachine& b, const Word& w) {
  std::size_t n = w.size();
  State lw = b.left().state_of(w);
  if (!b.left().is_final(lw)) return std::nullopt;
  Word o = b.lambda(b.right().state_of(w));
  for (std::size_t i = 0; i < n; ++i) {
    Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
    Word suffix(w.begin() + static_cast<std::ptrdiff_t>(i) + 1, w.end());
    o = concat(o, b.out(b.left().state_of(prefix), w[i], b.right().state_of(suffix)));
  }
  return concat(o, b.rho(lw));
}

inline std::optional<Word> brute_eval(const SequentialTransducer& s, const Word& w) {
  return brute_eval(to_transducer(s), w);
}

template <class M1, class M2>
std::optional<Word> first_disagreement(const M1& a, const M2& b, std::size_t letters, std::size_t max_len) {
  for (const Word& w : words_up_to(letters, max_len)) {
    if (brute_eval(a, w) != brute_eval(b, w)) return w;
  }
  return std::nullopt;
}

// A map from the accessible states of `fine` onto all accessible states of
// `coarse` that commutes with the transitions and keeps finality.
template <Direction D>
bool surjects(const DetAutomaton<D>& fine, const DetAutomaton<D>& coarse) {
  if (fine.num_letters() != coarse.num_letters()) return false;
  std::map<State, State> image;
  std::vector<std::pair<State, State>> stack{{fine.initial(), coarse.initial()}};
  while (!stack.empty()) {
    auto [p, q] = stack.back();
    stack.pop_back();
    auto it = image.find(p);
    if (it != image.end()) {
      if (it->second != q) return false;
      continue;
    }
    if (fine.is_final(p) != coarse.is_final(q)) return false;
    image[p] = q;
    for (Letter a = 0; a < fine.num_letters(); ++a) stack.push_back({fine.next(p, a), coarse.next(q, a)});
  }
  std::set<State> hit;
  for (const auto& [p, q] : image) hit.insert(q);
  std::set<State> reach{coarse.initial()};
  std::vector<State> todo{coarse.initial()};
  while (!todo.empty()) {
    State q = todo.back();
    todo.pop_back();
    for (Letter a = 0; a < coarse.num_letters(); ++a) {
      if (reach.insert(coarse.next(q, a)).second) todo.push_back(coarse.next(q, a));
    }
  }
  return hit == reach;
}

// States that are accessible and lead to a final state.
template <Direction D>
std::size_t trimmed_size(const DetAutomaton<D>& a) {
  std::set<State> reach{a.initial()};
  std::vector<State> todo{a.initial()};
  while (!todo.empty()) {
    State q = todo.back();
    todo.pop_back();
    for (Letter x = 0; x < a.num_letters(); ++x) {
      if (reach.insert(a.next(q, x)).second) todo.push_back(a.next(q, x));
    }
  }
  std::set<State> live;
  for (State q : reach)
    if (a.is_final(q)) live.insert(q);
  for (bool grew = true; grew;) {
    grew = false;
    for (State q : reach) {
      if (live.count(q)) continue;
      for (Letter x = 0; x < a.num_letters(); ++x) {
        if (live.count(a.next(q, x))) {
          live.insert(q);
          grew = true;
          break;
        }
      }
    }
  }
  return live.size();
}

// Monoid facts from the definitions, over all elements as state relations
// reached by words up to the monoid's size.
struct BruteMonoid {
  std::vector<BoolMatrix> elements;

  explicit BruteMonoid(const std::vector<BoolMatrix>& gens, std::size_t dim) {
    std::set<std::vector<char>> seen;
    auto key = [&](const BoolMatrix& m) {
      std::vector<char> k;
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) k.push_back(m.get(i, j));
      return k;
    };
    std::vector<BoolMatrix> frontier{BoolMatrix::identity(dim)};
    seen.insert(key(frontier[0]));
    elements = frontier;
    while (!frontier.empty()) {
      std::vector<BoolMatrix> next;
      for (const auto& m : frontier) {
        for (const auto& g : gens) {
          BoolMatrix p = m * g;
          if (seen.insert(key(p)).second) {
            next.push_back(p);
            elements.push_back(p);
          }
        }
      }
      frontier.swap(next);
    }
  }

  BoolMatrix omega(const BoolMatrix& x) const {
    BoolMatrix p = x;
    for (std::size_t i = 1; i < elements.size(); ++i) p = p * x;  // x^n with n = |M|
    BoolMatrix e = p;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (e * e == e) return e;
      e = e * x;
    }
    return e;
  }

  bool aperiodic() const {
    for (const auto& x : elements) {
      BoolMatrix p = x;
      for (std::size_t i = 1; i < elements.size(); ++i) p = p * x;
      if (!(p * x == p)) return false;
    }
    return true;
  }
  bool idempotent() const {
    for (const auto& x : elements)
      if (!(x * x == x)) return false;
    return true;
  }
  // (xyz)^ω y (xyz)^ω = (xyz)^ω
  bool da() const {
    for (const auto& x : elements)
      for (const auto& y : elements)
        for (const auto& z : elements) {
          BoolMatrix e = omega(x * y * z);
          if (!(e * y * e == e)) return false;
        }
    return true;
  }
  // MxM = MyM implies x = y
  bool j_trivial() const {
    auto ideal = [&](const BoolMatrix& x) {
      std::vector<BoolMatrix> out;
      for (const auto& s : elements)
        for (const auto& t : elements) out.push_back(s * x * t);
      return out;
    };
    auto contains = [](const std::vector<BoolMatrix>& v, const BoolMatrix& m) {
      return std::find(v.begin(), v.end(), m) != v.end();
    };
    for (std::size_t i = 0; i < elements.size(); ++i) {
      auto ii = ideal(elements[i]);
      for (std::size_t j = i + 1; j < elements.size(); ++j) {
        if (contains(ii, elements[j]) && contains(ideal(elements[j]), elements[i])) return false;
      }
    }
    return true;
  }
  bool in(MonoidClass c) const {
    switch (c) {
      case MonoidClass::Finite: return true;
      case MonoidClass::Aperiodic: return aperiodic();
      case MonoidClass::DA: return da();
      case MonoidClass::JTrivial: return j_trivial();
      case MonoidClass::Idempotent: return idempotent();
    }
    return false;
  }
};

// Greatest distance between the two functions over the common domain words
// of each length up to max_len. Configurations keep every partial run with
// its output; outputs shared by all runs are dropped since they cancel out
// of every later distance.
inline std::vector<std::optional<std::size_t>> distance_profile(const Transducer& t1, const Transducer& t2,
                                                                 std::size_t max_len) {
  using Runs = std::set<std::pair<State, Word>>;
  using Config = std::pair<Runs, Runs>;
  auto start = [](const Transducer& t) {
    Runs r;
    for (State q = 0; q < t.num_states(); ++q)
      if (t.is_initial(q)) r.insert({q, *t.initial(q)});
    return r;
  };
  auto step = [](const Transducer& t, const Runs& cur, Letter a) {
    Runs nxt;
    for (const auto& [q, o] : cur)
      for (std::size_t e : t.edges_from(q, a)) nxt.insert({t.edges()[e].to, concat(o, t.edges()[e].out)});
    return nxt;
  };
  auto normalize = [](Config c) {
    std::optional<Word> common;
    for (const Runs* r : {&c.first, &c.second})
      for (const auto& [q, o] : *r) common = common ? lcp(*common, o) : o;
    if (!common || common->empty()) return c;
    Config n;
    for (const auto& [q, o] : c.first) n.first.insert({q, left_quotient(*common, o)});
    for (const auto& [q, o] : c.second) n.second.insert({q, left_quotient(*common, o)});
    return n;
  };
  auto finish = [](const Transducer& t, const Runs& r) {
    std::set<Word> outs;
    for (const auto& [q, o] : r)
      if (t.is_final(q)) outs.insert(concat(o, *t.final_output(q)));
    return outs;
  };
  std::vector<std::optional<std::size_t>> profile;
  std::set<Config> level{normalize({start(t1), start(t2)})};
  for (std::size_t n = 0;; ++n) {
    std::optional<std::size_t> best;
    for (const auto& c : level) {
      auto o1 = finish(t1, c.first), o2 = finish(t2, c.second);
      if (o1.size() > 1 || o2.size() > 1) throw NotFunctionalInput("oracle: ambiguous output");
      if (o1.empty() != o2.empty()) throw PreconditionViolated("oracle: domains differ");
      if (o1.empty()) continue;
      std::size_t d = prefix_distance(*o1.begin(), *o2.begin());
      best = best ? std::max(*best, d) : d;
    }
    profile.push_back(best);
    if (n == max_len) break;
    std::set<Config> next;
    for (const auto& c : level) {
      for (Letter a = 0; a < t1.num_letters(); ++a) {
        Config s{step(t1, c.first, a), step(t2, c.second, a)};
        if (s.first.empty() && s.second.empty()) continue;
        next.insert(normalize(std::move(s)));
      }
    }
    level.swap(next);
  }
  return profile;
}

// ---- random machines ------------------------------------------------------

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline Word random_word(Rng& rng, std::size_t letters, std::size_t max_len) {
  Word w(uniform(rng, 0, max_len));
  for (auto& x : w) x = static_cast<Letter>(uniform(rng, 0, letters - 1));
  return w;
}

template <Direction D>
DetAutomaton<D> random_automaton(Rng& rng, std::size_t letters, std::size_t states, double final_p) {
  DetAutomaton<D> a(letters, states, 0);
  for (State q = 0; q < states; ++q) {
    a.set_final(q, coin(rng, final_p));
    for (Letter x = 0; x < letters; ++x) a.set_next(q, x, static_cast<State>(uniform(rng, 0, states - 1)));
  }
  if (!coin(rng, 0.2)) a.set_final(static_cast<State>(uniform(rng, 0, states - 1)));
  return a;
}

inline Transducer random_transducer(Rng& rng, std::size_t letters, std::size_t states, std::size_t max_out,
                                    double edge_p) {
  Transducer t(letters, states);
  t.set_initial(0, random_word(rng, letters, 1));
  if (states > 1 && coin(rng, 0.3)) t.set_initial(1, random_word(rng, letters, 1));
  for (State q = 0; q < states; ++q) {
    if (coin(rng, 0.5)) t.set_final(q, random_word(rng, letters, 1));
    for (Letter a = 0; a < letters; ++a)
      for (State p = 0; p < states; ++p)
        if (coin(rng, edge_p)) t.add_edge(q, a, p, random_word(rng, letters, max_out));
  }
  return t;
}

// Functional transducers: random ones filtered by the decision procedure,
// each confirmed by run enumeration.
inline std::optional<Transducer> random_functional(Rng& rng, std::size_t letters, std::size_t states,
                                                   std::size_t max_out) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Transducer t = trim(random_transducer(rng, letters, states, max_out, 0.35));
    if (t.num_states() == 0) continue;
    if (!is_functional(t)) continue;
    if (!brute_functional(t, 7)) throw Error("oracle: functionality verdict contradicted");
    return t;
  }
  return std::nullopt;
}

// Bimachines over random complete automata; the right automaton recognises
// the language of the left one. λ and ρ are only set on final states.
inline Bimachine random_bimachine(Rng& rng, std::size_t letters, std::size_t max_states, std::size_t max_out) {
  for (;;) {
    LeftAutomaton l(letters, 1);
    RightAutomaton r(letters, 1);
    if (coin(rng, 0.4)) {
      l = random_automaton<Direction::Forward>(rng, letters, uniform(rng, 1, max_states), 1.0);
      r = random_automaton<Direction::Backward>(rng, letters, uniform(rng, 1, max_states), 1.0);
    } else {
      l = random_automaton<Direction::Forward>(rng, letters, uniform(rng, 1, max_states), 0.5);
      auto back = backward_language(l, max_states);
      if (!back) continue;
      r = *back;
      // spread the right automaton over extra equivalent states
      if (r.num_states() < max_states && coin(rng, 0.5)) {
        RightAutomaton big(letters, r.num_states() + 1, r.initial());
        State copy = static_cast<State>(r.num_states());
        State orig = static_cast<State>(uniform(rng, 0, r.num_states() - 1));
        for (State q = 0; q < r.num_states(); ++q) {
          big.set_final(q, r.is_final(q));
          for (Letter a = 0; a < letters; ++a) {
            State p = r.next(q, a);
            big.set_next(q, a, p == orig && coin(rng, 0.5) ? copy : p);
          }
        }
        big.set_final(copy, r.is_final(orig));
        for (Letter a = 0; a < letters; ++a) big.set_next(copy, a, r.next(orig, a));
        r = big;
      }
    }
    Bimachine b(l, r);
    for (State x = 0; x < l.num_states(); ++x) {
      if (l.is_final(x)) b.set_rho(x, random_word(rng, letters, max_out));
      for (Letter a = 0; a < letters; ++a)
        for (State y = 0; y < r.num_states(); ++y) b.set_out(x, a, y, random_word(rng, letters, max_out));
    }
    for (State y : r.finals()) b.set_lambda(y, random_word(rng, letters, max_out));
    return b;
  }
}

// Unambiguous transducer reading through a domain automaton in product with
// a complete deterministic or co-deterministic layer of all-final states.
inline Transducer layered_transducer(Rng& rng, const LeftAutomaton& dom, std::size_t layer_states, bool codet,
                                     std::size_t max_out, std::size_t max_end, bool copy_input) {
  std::size_t letters = dom.num_letters(), nd = dom.num_states(), nx = layer_states;
  auto id = [nx](State d, State x) { return static_cast<State>(d * nx + x); };
  Transducer t(letters, nd * nx);
  std::vector<State> step(nx * letters);
  for (auto& s : step) s = static_cast<State>(uniform(rng, 0, nx - 1));
  auto out = [&](Letter a) {
    Word w = random_word(rng, letters, max_out);
    if (copy_input && coin(rng, 0.7)) w = Word(uniform(rng, 0, max_out), a);
    return w;
  };
  for (State d = 0; d < nd; ++d) {
    for (Letter a = 0; a < letters; ++a) {
      State d2 = dom.next(d, a);
      for (State x = 0; x < nx; ++x) {
        State x2 = step[x * letters + a];
        // co-deterministic layers read x2 → x when the backward reader goes x → x2
        if (codet) {
          t.add_edge(id(d, x2), a, id(d2, x), out(a));
        } else {
          t.add_edge(id(d, x), a, id(d2, x2), out(a));
        }
      }
    }
  }
  for (State x = 0; x < nx; ++x) {
    if (!codet && x != 0) continue;
    t.set_initial(id(dom.initial(), x), random_word(rng, letters, max_end));
  }
  for (State d = 0; d < nd; ++d) {
    if (!dom.is_final(d)) continue;
    for (State x = 0; x < nx; ++x) {
      if (codet && x != 0) continue;
      t.set_final(id(d, x), random_word(rng, letters, max_end));
    }
  }
  return trim(t);
}

}  // namespace ratfn::testing
