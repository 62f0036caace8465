#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace ratfn;
using namespace ratfn::testing;

TEST_CASE("word helpers") {
  Word u{0, 1, 1}, v{0, 1, 0, 0};
  CHECK(lcp(u, v) == Word{0, 1});
  CHECK(prefix_distance(u, v) == 3);
  CHECK(delay(u, v) == std::pair<Word, Word>{Word{1}, Word{0, 0}});
  CHECK(left_quotient(Word{0}, u) == Word{1, 1});
  CHECK_THROWS_AS(left_quotient(Word{1}, u), PreconditionViolated);
  CHECK(power(Word{0, 1}, 3).size() == 6);
  CHECK(words_up_to(2, 3).size() == 15);
  CHECK(words_up_to(2, 3).front().empty());
}

TEST_CASE("alphabet formatting") {
  Alphabet ab{"a", "b"};
  CHECK(ab.format(Word{0, 1, 1}) == "abb");
  CHECK(ab.parse("abb") == Word{0, 1, 1});
  CHECK(ab.parse("a b b") == Word{0, 1, 1});
  CHECK_FALSE(ab.parse("abc"));
  Alphabet states{"q0", "q1"};
  CHECK(states.format(Word{1, 0}) == "q1 q0");
  CHECK(states.parse("q1 q0") == Word{1, 0});
}

TEST_CASE("partitions") {
  auto p = Partition::from_labels(std::vector<int>{5, 5, 2, 7});
  CHECK(p.block == std::vector<std::uint32_t>{0, 0, 1, 2});
  CHECK(p.count == 3);
  auto q = Partition::from_labels(std::vector<int>{0, 1, 1, 1});
  auto m = meet(p, q);
  CHECK(m.count == 4);
  CHECK(m.refines(p));
  CHECK(m.refines(q));
  CHECK_FALSE(p.refines(q));
  CHECK(Partition::discrete(3).refines(Partition::single(3)));
}

TEST_CASE("minimize agrees with language equality on random automata") {
  Rng rng(11);
  for (int i = 0; i < 150; ++i) {
    auto a = random_automaton<Direction::Forward>(rng, 2, uniform(rng, 1, 6), 0.4);
    auto m = minimize(a);
    for (const Word& w : words_up_to(2, 7)) REQUIRE(a.accepts(w) == m.accepts(w));
    CHECK(surjects(a, m));
    CHECK(minimize(m) == m);
    // no two states of the minimal automaton have the same future
    auto reps = state_representatives(m);
    for (State x = 0; x < m.num_states(); ++x)
      for (State y = x + 1; y < m.num_states(); ++y) {
        bool same = true;
        for (const Word& s : words_up_to(2, m.num_states())) {
          same = same && m.accepts(concat(*reps[x], s)) == m.accepts(concat(*reps[y], s));
        }
        CHECK_FALSE(same);
      }
  }
}

TEST_CASE("right automata read right to left") {
  auto doc = load_fixture("last_letter.rdfa");
  auto r = doc.get<RightAutomaton>();
  REQUIRE(r);
  CHECK(r->accepts(Word{0, 1}));
  CHECK_FALSE(r->accepts(Word{1, 0}));
  CHECK(r->state_of(Word{1, 1, 0}) == 1);
  auto fwd = forward_language(*r, 8);
  REQUIRE(fwd);
  for (const Word& w : words_up_to(2, 6)) CHECK(fwd->accepts(w) == r->accepts(w));
  auto back = backward_language(*fwd, 8);
  REQUIRE(back);
  CHECK(minimize(*back) == minimize(*r));
  CHECK(same_language(*fwd, *r));
}

TEST_CASE("determinize and codeterminize keep the language") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Nfa n(2, uniform(rng, 1, 4));
    for (State q = 0; q < n.num_states(); ++q) {
      n.set_initial(q, coin(rng, 0.4));
      n.set_final(q, coin(rng, 0.4));
      for (Letter a = 0; a < 2; ++a)
        for (State p = 0; p < n.num_states(); ++p)
          if (coin(rng, 0.3)) n.add_transition(q, a, p);
    }
    auto d = determinize(n);
    auto c = codeterminize(n);
    for (const Word& w : words_up_to(2, 6)) {
      REQUIRE(d.accepts(w) == n.accepts(w));
      REQUIRE(c.accepts(w) == n.accepts(w));
    }
  }
}

namespace {

// All set partitions of {0..n-1} in restricted-growth form.
void all_partitions(std::size_t n, std::vector<std::uint32_t>& cur, std::uint32_t used,
                    std::vector<Partition>& out) {
  if (cur.size() == n) {
    out.push_back(Partition::from_labels(cur));
    return;
  }
  for (std::uint32_t b = 0; b <= used && b < n; ++b) {
    cur.push_back(b);
    all_partitions(n, cur, std::max(used, b + 1), out);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("compatible quotients match exhaustive enumeration") {
  Rng rng(13);
  for (int i = 0; i < 60; ++i) {
    auto a = canonical(random_automaton<Direction::Forward>(rng, 2, uniform(rng, 1, 6), 0.5));
    std::vector<Partition> every;
    std::vector<std::uint32_t> cur;
    all_partitions(a.num_states(), cur, 0, every);
    std::vector<Partition> expected;
    for (const auto& p : every) {
      bool ok = true;
      for (State q = 0; q < a.num_states() && ok; ++q)
        for (State r = 0; r < a.num_states() && ok; ++r) {
          if (!p.same(q, r)) continue;
          ok = a.is_final(q) == a.is_final(r);
          for (Letter x = 0; x < 2 && ok; ++x) ok = p.same(a.next(q, x), a.next(r, x));
        }
      if (ok) expected.push_back(p);
    }
    auto got = enumerate_compatible_quotients(a, std::nullopt, 12);
    std::sort(got.begin(), got.end(), [](auto& x, auto& y) { return x.block < y.block; });
    std::sort(expected.begin(), expected.end(), [](auto& x, auto& y) { return x.block < y.block; });
    CHECK(got == expected);
  }
}

TEST_CASE("quotient enumeration is budgeted") {
  LeftAutomaton a(1, 5);
  for (State q = 0; q < 5; ++q) a.set_next(q, 0, (q + 1) % 5);
  CHECK_THROWS_AS(enumerate_compatible_quotients(a, std::nullopt, 4), BudgetExceeded);
  CHECK(enumerate_compatible_quotients(a, std::nullopt, 5).size() == 2);  // the 5-cycle and its collapse
}

TEST_CASE("incompatible partitions are rejected") {
  auto r = *load_fixture("last_letter.rdfa").get<RightAutomaton>();
  CHECK_THROWS_AS(quotient(r, Partition::from_labels(std::vector<int>{0, 1, 1})), IncompatiblePartition);
  CHECK_FALSE(coarsening_map(universal_automaton<Direction::Backward>(2), r));
  CHECK(refines(r, universal_automaton<Direction::Backward>(2)) == false);
}
