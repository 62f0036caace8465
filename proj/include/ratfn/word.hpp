#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ratfn {

using Letter = std::uint32_t;
using State = std::uint32_t;
using Word = std::vector<Letter>;

inline constexpr State kNoState = static_cast<State>(-1);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (Letter a : w) {
      h ^= a + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h ^ w.size();
  }
};

inline std::size_t lcp_length(const Word& u, const Word& v) {
  std::size_t n = std::min(u.size(), v.size());
  std::size_t i = 0;
  while (i < n && u[i] == v[i]) ++i;
  return i;
}

// Longest common prefix u ∧ v.
inline Word lcp(const Word& u, const Word& v) {
  return Word(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(lcp_length(u, v)));
}

inline bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

// |u| + |v| - 2|u ∧ v|
inline std::size_t prefix_distance(const Word& u, const Word& v) {
  return u.size() + v.size() - 2 * lcp_length(u, v);
}

// The residual pair after removing the common prefix.
inline std::pair<Word, Word> delay(const Word& u, const Word& v) {
  std::size_t k = lcp_length(u, v);
  return {Word(u.begin() + static_cast<std::ptrdiff_t>(k), u.end()),
          Word(v.begin() + static_cast<std::ptrdiff_t>(k), v.end())};
}

// p⁻¹w, defined only when p is a prefix of w.
inline Word left_quotient(const Word& p, const Word& w) {
  if (!is_prefix(p, w)) throw PreconditionViolated("left quotient of a non-prefix");
  return Word(w.begin() + static_cast<std::ptrdiff_t>(p.size()), w.end());
}

inline Word concat(Word u, const Word& v) {
  u.insert(u.end(), v.begin(), v.end());
  return u;
}

inline Word concat(Word u, const Word& v, const Word& w) {
  u.insert(u.end(), v.begin(), v.end());
  u.insert(u.end(), w.begin(), w.end());
  return u;
}

inline Word reversed(Word w) {
  std::reverse(w.begin(), w.end());
  return w;
}

inline Word power(const Word& w, std::size_t k) {
  Word r;
  r.reserve(w.size() * k);
  for (std::size_t i = 0; i < k; ++i) r.insert(r.end(), w.begin(), w.end());
  return r;
}

// All words of length <= max_len over k letters, shortlex order.
inline std::vector<Word> words_up_to(std::size_t letters, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (Letter a = 0; a < letters; ++a) {
        Word w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

// Named letters. Tokens are arbitrary non-blank strings without quotes.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> tokens) {
    for (auto& t : tokens) add(std::move(t));
  }
  Alphabet(std::initializer_list<const char*> tokens) {
    for (const char* t : tokens) add(t);
  }

  Letter add(std::string token) {
    if (token.empty()) throw PreconditionViolated("empty letter token");
    auto [it, inserted] = index_.emplace(token, static_cast<Letter>(tokens_.size()));
    if (!inserted) throw PreconditionViolated("duplicate letter '" + token + "'");
    tokens_.push_back(std::move(token));
    return it->second;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& name(Letter a) const { return tokens_.at(a); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<Letter> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool single_char() const {
    return std::all_of(tokens_.begin(), tokens_.end(),
                       [](const std::string& t) { return t.size() == 1; });
  }

  // Words are written as concatenated characters when every token is one
  // character, and as blank-separated tokens otherwise.
  std::string format(const Word& w) const {
    std::string s;
    bool spaced = !single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (spaced && i > 0) s += ' ';
      s += name(w[i]);
    }
    return s;
  }

  // Inverse of format: blank-separated tokens, a single whole token, or a run
  // of one-character tokens.
  std::optional<Word> parse(const std::string& s) const {
    Word w;
    if (s.find_first_of(" \t") != std::string::npos) {
      std::size_t i = 0;
      while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) {
          auto a = find(s.substr(i, j - i));
          if (!a) return std::nullopt;
          w.push_back(*a);
        }
        i = j;
      }
      return w;
    }
    if (s.empty()) return w;
    if (auto a = find(s)) return Word{*a};
    for (char c : s) {
      auto a = find(std::string(1, c));
      if (!a) return std::nullopt;
      w.push_back(*a);
    }
    return w;
  }

  bool operator==(const Alphabet& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Letter> index_;
};

}  // namespace ratfn
