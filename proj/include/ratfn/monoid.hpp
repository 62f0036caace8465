#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "automaton.hpp"
#include "errors.hpp"
#include "word.hpp"

namespace ratfn {

inline constexpr std::size_t kDefaultElementBudget = 200000;

// Square boolean matrix, rows packed into 64-bit words.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  explicit BoolMatrix(std::size_t n) : n_(n), w_((n + 63) / 64), bits_(n_ * w_, 0) {}

  static BoolMatrix identity(std::size_t n) {
    BoolMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  std::size_t dim() const { return n_; }
  bool get(std::size_t i, std::size_t j) const { return (bits_[i * w_ + j / 64] >> (j % 64)) & 1u; }
  void set(std::size_t i, std::size_t j, bool on = true) {
    auto& word = bits_[i * w_ + j / 64];
    std::uint64_t bit = std::uint64_t{1} << (j % 64);
    word = on ? (word | bit) : (word & ~bit);
  }

  BoolMatrix operator*(const BoolMatrix& o) const {
    BoolMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t* out = &r.bits_[i * w_];
      for (std::size_t j = 0; j < n_; ++j) {
        if (!get(i, j)) continue;
        const std::uint64_t* row = &o.bits_[j * w_];
        for (std::size_t k = 0; k < w_; ++k) out[k] |= row[k];
      }
    }
    return r;
  }

  // Block-diagonal sum, used for the monoid of pairs.
  static BoolMatrix direct_sum(const BoolMatrix& a, const BoolMatrix& b) {
    BoolMatrix m(a.n_ + b.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t j = 0; j < a.n_; ++j)
        if (a.get(i, j)) m.set(i, j);
    for (std::size_t i = 0; i < b.n_; ++i)
      for (std::size_t j = 0; j < b.n_; ++j)
        if (b.get(i, j)) m.set(a.n_ + i, a.n_ + j);
    return m;
  }

  bool operator==(const BoolMatrix& o) const { return n_ == o.n_ && bits_ == o.bits_; }

  std::size_t hash() const {
    std::size_t h = n_;
    for (auto b : bits_) h = h * 1000003u ^ static_cast<std::size_t>(b ^ (b >> 29));
    return h;
  }

 private:
  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct BoolMatrixHash {
  std::size_t operator()(const BoolMatrix& m) const { return m.hash(); }
};

using Element = std::uint32_t;

// Finite monoid generated by one matrix per letter. Element 0 is the
// identity; elements are numbered in breadth-first order of their shortest
// representative words.
class TransitionMonoid {
 public:
  TransitionMonoid(std::vector<BoolMatrix> generators, std::size_t dim, std::size_t budget = kDefaultElementBudget) {
    letters_ = generators.size();
    auto intern = [&](BoolMatrix m, Word w) -> std::pair<Element, bool> {
      auto [it, inserted] = index_.emplace(std::move(m), static_cast<Element>(elements_.size()));
      if (inserted) {
        if (elements_.size() >= budget) throw ElementBudgetExceeded(budget);
        elements_.push_back(it->first);
        words_.push_back(std::move(w));
      }
      return {it->second, inserted};
    };
    intern(BoolMatrix::identity(dim), Word{});
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      for (Letter a = 0; a < letters_; ++a) {
        Word w = words_[i];
        w.push_back(a);
        auto [e, fresh] = intern(elements_[i] * generators[a], std::move(w));
        right_.push_back(e);
      }
    }
    for (Letter a = 0; a < letters_; ++a) generator_.push_back(right_[a]);
    left_.resize(elements_.size() * letters_);
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      for (Letter a = 0; a < letters_; ++a) {
        left_[i * letters_ + a] = index_.at(generators[a] * elements_[i]);
      }
    }
  }

  std::size_t size() const { return elements_.size(); }
  std::size_t num_generators() const { return letters_; }
  Element identity() const { return 0; }
  Element generator(Letter a) const { return generator_.at(a); }
  const BoolMatrix& matrix(Element x) const { return elements_.at(x); }
  const Word& representative(Element x) const { return words_.at(x); }

  // x·a and a·x
  Element right_act(Element x, Letter a) const { return right_[x * letters_ + a]; }
  Element left_act(Letter a, Element x) const { return left_[x * letters_ + a]; }

  Element multiply(Element x, Element y) const {
    for (Letter a : words_[y]) x = right_act(x, a);
    return x;
  }

  Element of_word(const Word& w) const {
    Element x = identity();
    for (Letter a : w) x = right_act(x, a);
    return x;
  }

  std::optional<Element> find(const BoolMatrix& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::vector<Element>> multiplication_table() const {
    std::vector<std::vector<Element>> t(size(), std::vector<Element>(size()));
    for (Element x = 0; x < size(); ++x)
      for (Element y = 0; y < size(); ++y) t[x][y] = multiply(x, y);
    return t;
  }

  // The unique idempotent power of x.
  Element omega(Element x) const {
    Element p = x;
    for (std::size_t k = 0; k <= size(); ++k) {
      if (multiply(p, p) == p) return p;
      p = multiply(p, x);
    }
    throw Error("no idempotent power found");
  }

  // Two-sided ideal MxM as a membership vector.
  std::vector<char> ideal(Element x) const {
    std::vector<char> in(size(), 0);
    std::deque<Element> queue{x};
    in[x] = 1;
    while (!queue.empty()) {
      Element y = queue.front();
      queue.pop_front();
      for (Letter a = 0; a < letters_; ++a) {
        for (Element z : {right_act(y, a), left_act(a, y)}) {
          if (!in[z]) {
            in[z] = 1;
            queue.push_back(z);
          }
        }
      }
    }
    return in;
  }

 private:
  std::size_t letters_ = 0;
  std::vector<BoolMatrix> elements_;
  std::vector<Word> words_;
  std::unordered_map<BoolMatrix, Element, BoolMatrixHash> index_;
  std::vector<Element> generator_;
  std::vector<Element> right_;
  std::vector<Element> left_;
};

// Letter matrices. For a right automaton the matrix of a has a 1 at (p, q)
// when the reverse reader steps from q to p, so products follow left-to-right
// concatenation.
inline std::vector<BoolMatrix> letter_matrices(const Nfa& n) {
  std::vector<BoolMatrix> g(n.num_letters(), BoolMatrix(n.num_states()));
  for (State q = 0; q < n.num_states(); ++q)
    for (Letter a = 0; a < n.num_letters(); ++a)
      for (State p : n.successors(q, a)) g[a].set(q, p);
  return g;
}

template <Direction D>
std::vector<BoolMatrix> letter_matrices(const DetAutomaton<D>& d) {
  std::vector<BoolMatrix> g(d.num_letters(), BoolMatrix(d.num_states()));
  for (State q = 0; q < d.num_states(); ++q) {
    for (Letter a = 0; a < d.num_letters(); ++a) {
      if constexpr (D == Direction::Forward) {
        g[a].set(q, d.next(q, a));
      } else {
        g[a].set(d.next(q, a), q);
      }
    }
  }
  return g;
}

inline TransitionMonoid transition_monoid(const Nfa& n, std::size_t budget = kDefaultElementBudget) {
  return TransitionMonoid(letter_matrices(n), n.num_states(), budget);
}

template <Direction D>
TransitionMonoid transition_monoid(const DetAutomaton<D>& d, std::size_t budget = kDefaultElementBudget) {
  return TransitionMonoid(letter_matrices(d), d.num_states(), budget);
}

// Monoid of pairs (left element, right element).
inline TransitionMonoid pair_monoid(const LeftAutomaton& l, const RightAutomaton& r,
                                    std::size_t budget = kDefaultElementBudget) {
  auto gl = letter_matrices(l);
  auto gr = letter_matrices(r);
  std::vector<BoolMatrix> g;
  for (Letter a = 0; a < l.num_letters(); ++a) g.push_back(BoolMatrix::direct_sum(gl[a], gr[a]));
  return TransitionMonoid(std::move(g), l.num_states() + r.num_states(), budget);
}

enum class MonoidClass { Finite, Aperiodic, DA, JTrivial, Idempotent };

inline const char* class_name(MonoidClass c) {
  switch (c) {
    case MonoidClass::Finite: return "finite";
    case MonoidClass::Aperiodic: return "aperiodic";
    case MonoidClass::DA: return "da";
    case MonoidClass::JTrivial: return "jtrivial";
    case MonoidClass::Idempotent: return "idempotent";
  }
  return "?";
}

inline std::optional<MonoidClass> parse_class(const std::string& s) {
  for (auto c : {MonoidClass::Finite, MonoidClass::Aperiodic, MonoidClass::DA, MonoidClass::JTrivial,
                 MonoidClass::Idempotent}) {
    if (s == class_name(c)) return c;
  }
  return std::nullopt;
}

inline bool is_aperiodic(const TransitionMonoid& m) {
  for (Element x = 0; x < m.size(); ++x) {
    Element e = m.omega(x);
    if (m.multiply(e, x) != e) return false;
  }
  return true;
}

inline bool is_idempotent(const TransitionMonoid& m) {
  for (Element x = 0; x < m.size(); ++x) {
    if (m.multiply(x, x) != x) return false;
  }
  return true;
}

// (abc)^ω b (abc)^ω = (abc)^ω for all a, b, c. The products abc are exactly
// the members of the ideal MbM.
inline bool is_da(const TransitionMonoid& m) {
  std::vector<Element> omega(m.size());
  for (Element x = 0; x < m.size(); ++x) omega[x] = m.omega(x);
  for (Element b = 0; b < m.size(); ++b) {
    auto in = m.ideal(b);
    for (Element x = 0; x < m.size(); ++x) {
      if (!in[x]) continue;
      Element e = omega[x];
      if (m.multiply(m.multiply(e, b), e) != e) return false;
    }
  }
  return true;
}

inline bool is_j_trivial(const TransitionMonoid& m) {
  std::vector<std::vector<char>> ideals;
  ideals.reserve(m.size());
  for (Element x = 0; x < m.size(); ++x) ideals.push_back(m.ideal(x));
  for (Element x = 0; x < m.size(); ++x)
    for (Element y = x + 1; y < m.size(); ++y)
      if (ideals[x][y] && ideals[y][x]) return false;
  return true;
}

inline bool class_membership(const TransitionMonoid& m, MonoidClass c) {
  switch (c) {
    case MonoidClass::Finite: return true;
    case MonoidClass::Aperiodic: return is_aperiodic(m);
    case MonoidClass::DA: return is_da(m);
    case MonoidClass::JTrivial: return is_j_trivial(m);
    case MonoidClass::Idempotent: return is_idempotent(m);
  }
  return false;
}

}  // namespace ratfn
