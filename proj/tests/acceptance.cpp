// Acceptance criteria, one PASS/FAIL line each. Exit status is the number
// of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace ratfn;
using namespace ratfn::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "first failure: " << what << "; ";
    pass = false;
  }
};

constexpr MonoidClass kClasses[] = {MonoidClass::Aperiodic, MonoidClass::DA, MonoidClass::JTrivial,
                                    MonoidClass::Idempotent};

Word swap_definition(Word w) {
  if (w.size() >= 2) std::swap(w.front(), w.back());
  return w;
}

// 1. the swap bimachine
void swap_golden(Verdict& v) {
  auto doc = load_fixture("fig2.bm");
  const auto& b = *doc.get<Bimachine>();
  auto o = eval(b, *doc.input.parse("aabb"));
  v.require(o && doc.output.format(*o) == "baba", "swap(aabb) = baba");
  o = eval(b, *doc.input.parse("a"));
  v.require(o && doc.output.format(*o) == "a", "swap(a) = a");
  std::size_t n = 0;
  for (const Word& w : words_up_to(2, 5)) {
    ++n;
    v.require(eval(b, w) == swap_definition(w), "swap(" + doc.input.format(w) + ")");
  }
  v.detail << n << " words up to length 5 checked";
}

// 2. an idempotent transducer whose minimal sequential transducer is not idempotent
void fig1_regression(Verdict& v) {
  auto t = *load_fixture("fig1.ft").get<Transducer>();
  v.require(is_functional(t), "functional");
  v.require(is_idempotent(transition_monoid(t.underlying())), "transducer monoid idempotent");
  auto m = minimize_sequential(determinize_transducer(t, kDefaultDelayBudget));
  auto mon = transition_monoid(m.automaton);
  v.require(!is_idempotent(mon), "minimal sequential monoid not idempotent");
  v.require(is_aperiodic(mon), "minimal sequential monoid aperiodic");
  v.require(is_class_rational(t, MonoidClass::Idempotent), "idempotent-rational");
  v.require(!is_class_sequential(m, MonoidClass::Idempotent), "not idempotent-sequential");
  v.detail << "minimal sequential transducer has " << m.num_states() << " states, monoid of size " << mon.size();
}

// 3. determinizing an aperiodic transducer gives an aperiodic sequential transducer
void aperiodic_determinization(Verdict& v) {
  Rng rng(3003);
  std::size_t accepted = 0, over_budget = 0, not_aperiodic = 0, counterexamples = 0, generated = 0;
  while (accepted < 250) {
    std::size_t letters = uniform(rng, 1, 2);
    auto t = random_functional(rng, letters, uniform(rng, 1, 4), 2);
    if (!t) continue;
    ++generated;
    if (!is_aperiodic(transition_monoid(t->underlying()))) {
      ++not_aperiodic;
      continue;
    }
    SequentialTransducer s;
    try {
      s = determinize_transducer(*t, kDefaultDelayBudget);
    } catch (const BudgetExceeded&) {
      ++over_budget;
      continue;
    }
    ++accepted;
    bool ok = is_aperiodic(transition_monoid(s.automaton)) &&
              is_aperiodic(transition_monoid(minimize_sequential(s).automaton)) &&
              !first_disagreement(*t, to_transducer(s), letters, 6);
    if (!ok) ++counterexamples;
  }
  v.require(counterexamples == 0, std::to_string(counterexamples) + " counterexamples");
  v.detail << accepted << " aperiodic transducers determinized, " << counterexamples << " counterexamples ("
           << generated << " functional samples, " << not_aperiodic << " not aperiodic, " << over_budget
           << " over budget)";
}

// 4. bimachine minimisation
void bimachine_minimisation(Verdict& v) {
  Rng rng(4004);
  std::size_t n = 0, bad_function = 0, not_fixpoint = 0, no_surjection = 0;
  for (; n < 250; ++n) {
    auto b = random_bimachine(rng, 2, 4, 2);
    auto m = minimize_bimachine(b);
    if (first_disagreement(b, m, 2, 6)) ++bad_function;
    if (!boxminus_equal(minimize_bimachine(m), m)) ++not_fixpoint;
    if (!surjects(b.left(), m.left()) || !surjects(b.right(), m.right())) ++no_surjection;
  }
  v.require(bad_function == 0, "function changed");
  v.require(not_fixpoint == 0, "not idempotent");
  v.require(no_surjection == 0, "missing surjection");
  v.detail << n << " random bimachines: " << bad_function << " function changes, " << not_fixpoint
           << " fixpoint failures, " << no_surjection << " missing surjections";
}

// 5. canonical objects
void canonical_objects(Verdict& v) {
  auto swap_t = fixture_transducer(load_fixture("fig2.bm"));
  auto fig1 = *load_fixture("fig1.ft").get<Transducer>();
  std::size_t swap_r = trimmed_size(canonical_right_automaton(swap_t));
  std::size_t fig1_r = trimmed_size(canonical_right_automaton(fig1));
  auto bf = canonical_bimachine(fig1);
  auto seq = minimize_sequential(determinize_transducer(fig1));
  std::size_t fig1_left = trimmed_size(bf.left());
  v.require(swap_r == 3, "swap right automaton has 3 states");
  v.require(fig1_r == 1, "fig1 right automaton has 1 state");
  v.require(fig1_left == 3, "fig1 canonical left automaton has 3 states");
  v.require(iso_equal(canonical(bf.left()), canonical(seq.automaton)), "left automaton is the minimal sequential one");
  v.detail << "R(swap) " << swap_r << ", R(fig1) " << fig1_r << ", Left(R(fig1)) " << fig1_left << " states";
}

// 6. aperiodicity of functions
void aperiodic_functions(Verdict& v) {
  bool even = is_aperiodic_function(run_output_bimachine(minimize(determinize(*load_fixture("even_a.dfa").get<Nfa>()))));
  bool contains = is_aperiodic_function(run_output_bimachine(minimize(determinize(*load_fixture("contains_a.dfa").get<Nfa>()))));
  v.require(!even, "(aa)* gadget not aperiodic");
  v.require(contains, "words containing a gadget aperiodic");
  std::size_t disagreements = 0, fixtures = 0;
  for (const auto& name : function_fixtures()) {
    auto t = fixture_transducer(load_fixture(name));
    auto b = transducer_to_bimachine(t);
    ++fixtures;
    if (is_aperiodic_function(b) != is_class_rational_of(minimize_bimachine(b), MonoidClass::Aperiodic)) {
      ++disagreements;
      v.require(false, "shortcut disagrees on " + name);
    }
  }
  v.detail << "(aa)* " << (even ? "aperiodic" : "not aperiodic") << ", contains a "
           << (contains ? "aperiodic" : "not aperiodic") << ", " << disagreements << " disagreements over "
           << fixtures << " fixtures";
}

struct ClassCheck {
  std::size_t disagreements = 0, not_minimal = 0, no_surjection = 0, minimal_seen = 0, positives = 0;
};

void cross_validate(const Transducer& t, ClassCheck& c) {
  Bimachine m = minimal_from_transducer(t);
  auto all = minimal_bimachines_of(m);
  auto bf = canonical_bimachine_of(m);
  auto low = cocanonical_bimachine_of(m);
  for (const auto& x : all) {
    ++c.minimal_seen;
    if (!boxminus_equal(minimize_bimachine(x), x)) ++c.not_minimal;
    if (!surjects(bf.left(), x.left()) || !surjects(low.right(), x.right())) ++c.no_surjection;
  }
  for (auto cls : kClasses) {
    bool search = false;
    for (const auto& x : all) search = search || in_class(x, cls);
    auto bv = class_bimachine_of(m, cls);
    bool via_meet = bv && in_class(*bv, cls);
    if (search != via_meet) ++c.disagreements;
    c.positives += search;
  }
}

// 7. minimal-set search against the class bimachine
void class_cross_validation(Verdict& v) {
  ClassCheck c;
  for (const auto& name : function_fixtures()) cross_validate(fixture_transducer(load_fixture(name)), c);
  Rng rng(7007);
  std::size_t random = 0, over_budget = 0;
  while (random < 60) {
    auto t = random_functional(rng, 2, uniform(rng, 1, 3), 2);
    if (!t) continue;
    try {
      cross_validate(*t, c);
      ++random;
    } catch (const BudgetExceeded&) {
      ++over_budget;
    }
  }
  v.require(c.disagreements == 0, std::to_string(c.disagreements) + " disagreements");
  v.require(c.not_minimal == 0, "minimality fixpoint");
  v.require(c.no_surjection == 0, "surjections from the canonical automata");
  v.detail << function_fixtures().size() << " fixtures and " << random << " random transducers (" << over_budget
           << " over budget): " << c.disagreements << " disagreements over 4 classes, " << c.positives
           << " positive answers, " << c.minimal_seen << " minimal bimachines checked";
}

// 8. bounded distance against the distance profile
void bounded_distance_guard(Verdict& v) {
  Rng rng(8008);
  std::size_t pairs = 0, bounded = 0, unbounded = 0, contradictions = 0;
  while (pairs < 600) {
    std::size_t letters = uniform(rng, 1, 2);
    auto dom = random_automaton<Direction::Forward>(rng, letters, uniform(rng, 1, 3), 0.6);
    bool copy = coin(rng, 0.5);
    Transducer t1 = layered_transducer(rng, dom, uniform(rng, 1, 2), coin(rng, 0.5), 2, 2, copy);
    Transducer t2 = layered_transducer(rng, dom, uniform(rng, 1, 2), coin(rng, 0.5), 2, 2, copy);
    if (t1.num_states() == 0) continue;
    std::size_t p = pair_product(t1, t2).size();
    if (p == 0 || p > 12) continue;
    ++pairs;
    std::size_t m = std::max(t1.max_edge_output(), t2.max_edge_output());
    std::size_t ends = std::max(t1.max_end_output(), t2.max_end_output());
    // Any bounded pair stays within this distance: cycles cannot change the
    // delay, so every delay is reached along a path of fewer than |P| arcs.
    std::size_t threshold = ends + (p - 1) * m + 2 * ends;
    auto report = analyze_distance(t1, t2);
    if (report.bounded) {
      ++bounded;
      std::size_t top = 0;
      for (auto d : distance_profile(t1, t2, 2 * p + 2))
        if (d) top = std::max(top, *d);
      if (top > threshold) ++contradictions;
    } else {
      ++unbounded;
      bool grew = false;
      for (std::size_t k = 0; k <= 4 * threshold + 8 && !grew; ++k) {
        Word w = report.witness->instance(k);
        auto o1 = brute_eval(t1, w), o2 = brute_eval(t2, w);
        if (!o1 || !o2) break;
        grew = prefix_distance(*o1, *o2) > threshold;
      }
      if (!grew) ++contradictions;
    }
  }
  v.require(contradictions == 0, std::to_string(contradictions) + " contradictions");
  v.require(bounded >= 100 && unbounded >= 100, "both verdicts well represented");
  v.detail << pairs << " pairs (" << bounded << " bounded, " << unbounded << " unbounded), " << contradictions
           << " contradictions";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Verdict&)>> criteria[] = {
      {"swap bimachine golden values", swap_golden},
      {"idempotent transducer with non-idempotent minimal sequential form", fig1_regression},
      {"aperiodic determinization", aperiodic_determinization},
      {"bimachine minimisation properties", bimachine_minimisation},
      {"canonical object sizes", canonical_objects},
      {"aperiodicity of functions", aperiodic_functions},
      {"class decision cross-validation", class_cross_validation},
      {"bounded distance oracle guard", bounded_distance_guard},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    try {
      check(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << index << " (" << name << "): " << v.detail.str()
              << " [" << static_cast<int>(secs * 1000) << " ms]" << std::endl;
  }
  return failed;
}
