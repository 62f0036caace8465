#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "automaton.hpp"
#include "bimachine.hpp"
#include "errors.hpp"
#include "transducer.hpp"
#include "word.hpp"

// Line-oriented machine documents.
//
//   kind transducer          # automaton | right-automaton | transducer | sequential | bimachine
//   alphabet a b
//   output a b               # optional, defaults to the input alphabet
//   states 3
//   initial 0 ""
//   final 0 ""
//   edge 0 a 1 "a"
//
// Bimachines nest `left { ... }` and `right { ... }` automaton blocks and
// list `out l a r "w"`, `lfinal r "w"` (λ) and `rfinal l "w"` (ρ); missing
// outputs are empty. In a right automaton `edge q a p` means the reverse
// reader steps from q to p on a. Deterministic machines with missing edges
// are completed with one extra non-final sink state.

namespace ratfn {

enum class MachineKind { Automaton, RightAutomaton, Transducer, Sequential, Bimachine };

inline const char* kind_name(MachineKind k) {
  switch (k) {
    case MachineKind::Automaton: return "automaton";
    case MachineKind::RightAutomaton: return "right-automaton";
    case MachineKind::Transducer: return "transducer";
    case MachineKind::Sequential: return "sequential";
    case MachineKind::Bimachine: return "bimachine";
  }
  return "?";
}

struct MachineDocument {
  Alphabet input;
  Alphabet output;
  std::variant<Nfa, RightAutomaton, Transducer, SequentialTransducer, Bimachine> machine;

  MachineKind kind() const { return static_cast<MachineKind>(machine.index()); }
  template <class T>
  const T* get() const {
    return std::get_if<T>(&machine);
  }
};

namespace detail {

struct Token {
  std::string text;
  bool quoted = false;
};

inline std::vector<Token> tokenize(const std::string& line, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      break;
    } else if (c == '"') {
      std::size_t j = line.find('"', i + 1);
      if (j == std::string::npos) throw ParseError(lineno, "unterminated quoted word");
      out.push_back({line.substr(i + 1, j - i - 1), true});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#' &&
             line[j] != '"')
        ++j;
      out.push_back({line.substr(i, j - i), false});
      i = j;
    }
  }
  return out;
}

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

// An automaton block as written, before completion.
struct RawAutomaton {
  struct RawEnd {
    State state;
    std::optional<Word> out;
    std::size_t line;
  };
  std::size_t line = 0;  // where the automaton starts
  std::optional<std::size_t> states;
  std::vector<RawEnd> initial;
  std::vector<RawEnd> final;
  struct RawEdge {
    State from;
    Letter letter;
    State to;
    std::optional<Word> out;
    std::size_t line;
  };
  std::vector<RawEdge> edges;
};

class Parser {
 public:
  explicit Parser(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
      ++n;
      auto toks = tokenize(raw, n);
      if (!toks.empty()) lines_.push_back({n, std::move(toks)});
    }
  }

  MachineDocument parse() {
    if (lines_.empty()) throw ParseError(0, "empty document");
    const Line& first = lines_[0];
    if (first.tokens[0].text != "kind" || first.tokens.size() != 2) throw ParseError(first.number, "expected 'kind <name>'");
    std::string kind = first.tokens[1].text;
    pos_ = 1;
    MachineDocument doc;
    bool have_output = false;
    RawAutomaton raw, left, right;
    bool in_left = false, in_right = false, seen_left = false, seen_right = false;
    raw.line = first.number;
    struct RawOut {
      std::size_t line;
      State l;
      std::string letter;
      State r;
      std::string word;
    };
    std::vector<RawOut> outs;
    std::vector<std::pair<std::size_t, std::pair<State, std::string>>> lfinal, rfinal;
    std::vector<std::pair<std::size_t, std::vector<Token>>> pending;  // directives needing the alphabets

    for (; pos_ < lines_.size(); ++pos_) {
      const Line& ln = lines_[pos_];
      const auto& t = ln.tokens;
      const std::string& d = t[0].text;
      if (d == "alphabet") {
        for (std::size_t i = 1; i < t.size(); ++i) add_token(doc.input, t[i], ln.number);
      } else if (d == "output") {
        have_output = true;
        for (std::size_t i = 1; i < t.size(); ++i) add_token(doc.output, t[i], ln.number);
      } else if (kind == "bimachine" && (d == "left" || d == "right") && t.size() == 2 && t[1].text == "{") {
        if (in_left || in_right) throw ParseError(ln.number, "nested block");
        if ((d == "left" && seen_left) || (d == "right" && seen_right)) throw ParseError(ln.number, "duplicate block");
        (d == "left" ? in_left : in_right) = true;
        (d == "left" ? seen_left : seen_right) = true;
        (d == "left" ? left : right).line = ln.number;
      } else if (d == "}" && t.size() == 1) {
        if (!in_left && !in_right) throw ParseError(ln.number, "unmatched '}'");
        in_left = in_right = false;
      } else if (d == "states" || d == "initial" || d == "final" || d == "edge") {
        if (kind == "bimachine" && !in_left && !in_right) {
          throw ParseError(ln.number, "'" + d + "' outside a left/right block");
        }
        pending.push_back({ln.number, t});
        RawAutomaton& target = in_left ? left : in_right ? right : raw;
        target_of_.push_back(&target);
      } else if (kind == "bimachine" && d == "out") {
        if (t.size() != 5 || !t[4].quoted) throw ParseError(ln.number, "expected 'out l a r \"w\"'");
        outs.push_back({ln.number, state_token(t[1], ln.number), t[2].text, state_token(t[3], ln.number), t[4].text});
      } else if (kind == "bimachine" && (d == "lfinal" || d == "rfinal")) {
        if (t.size() != 3 || !t[2].quoted) throw ParseError(ln.number, "expected '" + d + " q \"w\"'");
        (d == "lfinal" ? lfinal : rfinal).push_back({ln.number, {state_token(t[1], ln.number), t[2].text}});
      } else {
        throw ParseError(ln.number, "unknown directive '" + d + "'");
      }
    }
    if (in_left || in_right) throw ParseError(lines_.back().number, "unterminated block");
    if (doc.input.size() == 0) throw ParseError(first.number, "missing alphabet");
    if (!have_output) doc.output = doc.input;

    for (std::size_t i = 0; i < pending.size(); ++i) read_directive(*target_of_[i], pending[i].second, pending[i].first, doc);

    std::size_t k = doc.input.size();
    if (kind == "automaton") {
      doc.machine = build_nfa(raw, k);
    } else if (kind == "right-automaton") {
      doc.machine = build_det<Direction::Backward>(raw, k, "right-automaton");
    } else if (kind == "transducer") {
      doc.machine = build_transducer(raw, k);
    } else if (kind == "sequential") {
      doc.machine = build_sequential(raw, k);
    } else if (kind == "bimachine") {
      if (!seen_left || !seen_right) throw ParseError(first.number, "bimachine needs left and right blocks");
      auto l = build_det<Direction::Forward>(left, k, "left");
      auto r = build_det<Direction::Backward>(right, k, "right");
      Bimachine b(l, r);
      for (const auto& o : outs) {
        auto a = doc.input.find(o.letter);
        if (!a) throw ParseError(o.line, "unknown letter '" + o.letter + "'");
        if (o.l >= l.num_states() || o.r >= r.num_states()) throw ParseError(o.line, "state out of range");
        b.set_out(o.l, *a, o.r, word(doc.output, o.word, o.line));
      }
      for (const auto& [line, entry] : lfinal) {
        if (entry.first >= r.num_states() || !r.is_final(entry.first)) throw ParseError(line, "lfinal needs a final right state");
        b.set_lambda(entry.first, word(doc.output, entry.second, line));
      }
      for (const auto& [line, entry] : rfinal) {
        if (entry.first >= l.num_states() || !l.is_final(entry.first)) throw ParseError(line, "rfinal needs a final left state");
        b.set_rho(entry.first, word(doc.output, entry.second, line));
      }
      if (!same_language(l, r)) throw ParseError(first.number, "left and right automata recognise different languages");
      doc.machine = std::move(b);
    } else {
      throw ParseError(first.number, "unknown kind '" + kind + "'");
    }
    return doc;
  }

 private:
  static void add_token(Alphabet& a, const Token& t, std::size_t line) {
    if (t.quoted || t.text.find('"') != std::string::npos) throw ParseError(line, "letters cannot be quoted");
    if (a.find(t.text)) throw ParseError(line, "duplicate letter '" + t.text + "'");
    a.add(t.text);
  }

  static State state_token(const Token& t, std::size_t line) {
    if (t.quoted || t.text.empty() || t.text.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(line, "expected a state number, got '" + t.text + "'");
    }
    try {
      return static_cast<State>(std::stoul(t.text));
    } catch (const std::exception&) {
      throw ParseError(line, "state number out of range");
    }
  }

  static Word word(const Alphabet& a, const std::string& s, std::size_t line) {
    auto w = a.parse(s);
    if (!w) throw ParseError(line, "cannot read \"" + s + "\" over the output alphabet");
    return *w;
  }

  void read_directive(RawAutomaton& target, const std::vector<Token>& t, std::size_t line, const MachineDocument& doc) {
    const std::string& d = t[0].text;
    auto opt_word = [&](std::size_t i) -> std::optional<Word> {
      if (i >= t.size()) return std::nullopt;
      if (!t[i].quoted) throw ParseError(line, "expected a quoted word");
      return word(doc.output, t[i].text, line);
    };
    if (d == "states") {
      if (t.size() != 2 || target.states) throw ParseError(line, "expected a single 'states n'");
      target.states = state_token(t[1], line);
    } else if (d == "initial" || d == "final") {
      if (t.size() < 2 || t.size() > 3) throw ParseError(line, "expected '" + d + " q [\"w\"]'");
      (d == "initial" ? target.initial : target.final).push_back({state_token(t[1], line), opt_word(2), line});
    } else {
      if (t.size() < 4 || t.size() > 5) throw ParseError(line, "expected 'edge p a q [\"w\"]'");
      auto a = doc.input.find(t[2].text);
      if (!a || t[2].quoted) throw ParseError(line, "unknown letter '" + t[2].text + "'");
      target.edges.push_back({state_token(t[1], line), *a, state_token(t[3], line), opt_word(4), line});
    }
  }

  static std::size_t count(const RawAutomaton& raw, const char* what) {
    if (!raw.states) throw ParseError(raw.line, std::string(what) + ": missing 'states'");
    return *raw.states;
  }

  static void check_range(const RawAutomaton& raw, std::size_t n) {
    for (const auto& e : raw.initial)
      if (e.state >= n) throw ParseError(e.line, "initial state " + std::to_string(e.state) + " out of range");
    for (const auto& e : raw.final)
      if (e.state >= n) throw ParseError(e.line, "final state " + std::to_string(e.state) + " out of range");
    for (const auto& e : raw.edges)
      if (e.from >= n || e.to >= n) throw ParseError(e.line, "edge state out of range");
  }

  static Nfa build_nfa(const RawAutomaton& raw, std::size_t k) {
    std::size_t n = count(raw, "automaton");
    check_range(raw, n);
    Nfa a(k, n);
    for (const auto& e : raw.initial) {
      if (e.out) throw ParseError(e.line, "automata carry no outputs");
      a.set_initial(e.state);
    }
    for (const auto& e : raw.final) {
      if (e.out) throw ParseError(e.line, "automata carry no outputs");
      a.set_final(e.state);
    }
    for (const auto& e : raw.edges) {
      if (e.out) throw ParseError(e.line, "automaton edges carry no output");
      a.add_transition(e.from, e.letter, e.to);
    }
    return a;
  }

  // Shared by deterministic kinds: transitions plus a sink for missing ones.
  template <Direction D>
  static DetAutomaton<D> build_det(const RawAutomaton& raw, std::size_t k, const char* what,
                                   std::vector<Word>* outs = nullptr) {
    std::size_t n = count(raw, what);
    check_range(raw, n);
    if (raw.initial.size() != 1) {
      throw ParseError(raw.initial.size() > 1 ? raw.initial[1].line : raw.line,
                       std::string(what) + ": needs exactly one initial state");
    }
    std::vector<State> next(n * k, kNoState);
    std::vector<Word> o(n * k);
    if (!outs) {
      for (const auto& e : raw.initial)
        if (e.out) throw ParseError(e.line, std::string(what) + ": automata carry no outputs");
      for (const auto& e : raw.final)
        if (e.out) throw ParseError(e.line, std::string(what) + ": automata carry no outputs");
    }
    for (const auto& e : raw.edges) {
      if (!outs && e.out) throw ParseError(e.line, "automaton edges carry no output");
      State& slot = next[e.from * k + e.letter];
      if (slot != kNoState && slot != e.to) throw ParseError(e.line, std::string(what) + ": nondeterministic edge");
      if (slot != kNoState && o[e.from * k + e.letter] != e.out.value_or(Word{})) {
        throw ParseError(e.line, "two outputs on the same transition");
      }
      slot = e.to;
      o[e.from * k + e.letter] = e.out.value_or(Word{});
    }
    bool incomplete = false;
    for (State s : next) incomplete = incomplete || s == kNoState;
    std::size_t total = n + (incomplete ? 1 : 0);
    DetAutomaton<D> a(k, total, raw.initial[0].state);
    for (const auto& e : raw.final) a.set_final(e.state);
    for (State q = 0; q < total; ++q) {
      for (Letter x = 0; x < k; ++x) {
        State p = q < n ? next[q * k + x] : kNoState;
        a.set_next(q, x, p == kNoState ? static_cast<State>(n) : p);
      }
    }
    if (outs) {
      o.resize(total * k);
      *outs = std::move(o);
    }
    return a;
  }

  static Transducer build_transducer(const RawAutomaton& raw, std::size_t k) {
    std::size_t n = count(raw, "transducer");
    check_range(raw, n);
    Transducer t(k, n);
    for (const auto& e : raw.initial) t.set_initial(e.state, e.out.value_or(Word{}));
    for (const auto& e : raw.final) t.set_final(e.state, e.out.value_or(Word{}));
    for (const auto& e : raw.edges) {
      try {
        t.add_edge(e.from, e.letter, e.to, e.out.value_or(Word{}));
      } catch (const PreconditionViolated& ex) {
        throw ParseError(e.line, ex.what());
      }
    }
    return t;
  }

  static SequentialTransducer build_sequential(const RawAutomaton& raw, std::size_t k) {
    std::vector<Word> outs;
    auto a = build_det<Direction::Forward>(raw, k, "sequential", &outs);
    SequentialTransducer s(a);
    s.out = std::move(outs);
    s.init_out = raw.initial[0].out.value_or(Word{});
    for (const auto& e : raw.final) s.final_out[e.state] = e.out.value_or(Word{});
    return s;
  }

  std::vector<Line> lines_;
  std::vector<RawAutomaton*> target_of_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline MachineDocument parse_machine(const std::string& text) { return detail::Parser(text).parse(); }

namespace detail {

inline std::string quote(const Alphabet& a, const Word& w) { return "\"" + a.format(w) + "\""; }

template <Direction D>
void print_det(std::ostringstream& s, const DetAutomaton<D>& a, const Alphabet& in, const std::string& indent) {
  s << indent << "states " << a.num_states() << "\n";
  s << indent << "initial " << a.initial() << "\n";
  for (State q : a.finals()) s << indent << "final " << q << "\n";
  for (State q = 0; q < a.num_states(); ++q)
    for (Letter x = 0; x < a.num_letters(); ++x) s << indent << "edge " << q << " " << in.name(x) << " " << a.next(q, x) << "\n";
}

}  // namespace detail

inline std::string print_machine(const MachineDocument& doc) {
  using detail::quote;
  std::ostringstream s;
  s << "kind " << kind_name(doc.kind()) << "\n";
  s << "alphabet";
  for (const auto& t : doc.input.tokens()) s << " " << t;
  s << "\n";
  if (!(doc.output == doc.input)) {
    s << "output";
    for (const auto& t : doc.output.tokens()) s << " " << t;
    s << "\n";
  }
  const Alphabet& in = doc.input;
  const Alphabet& out = doc.output;
  if (auto* a = doc.get<Nfa>()) {
    s << "states " << a->num_states() << "\n";
    for (State q : a->initials()) s << "initial " << q << "\n";
    for (State q : a->finals()) s << "final " << q << "\n";
    for (State q = 0; q < a->num_states(); ++q)
      for (Letter x = 0; x < a->num_letters(); ++x)
        for (State p : a->successors(q, x)) s << "edge " << q << " " << in.name(x) << " " << p << "\n";
  } else if (auto* r = doc.get<RightAutomaton>()) {
    detail::print_det(s, *r, in, "");
  } else if (auto* t = doc.get<Transducer>()) {
    s << "states " << t->num_states() << "\n";
    for (State q = 0; q < t->num_states(); ++q)
      if (t->is_initial(q)) s << "initial " << q << " " << quote(out, *t->initial(q)) << "\n";
    for (State q = 0; q < t->num_states(); ++q)
      if (t->is_final(q)) s << "final " << q << " " << quote(out, *t->final_output(q)) << "\n";
    for (const auto& e : t->edges())
      s << "edge " << e.from << " " << in.name(e.letter) << " " << e.to << " " << quote(out, e.out) << "\n";
  } else if (auto* q = doc.get<SequentialTransducer>()) {
    const auto& a = q->automaton;
    s << "states " << a.num_states() << "\n";
    s << "initial " << a.initial() << " " << quote(out, q->init_out) << "\n";
    for (State p : a.finals()) s << "final " << p << " " << quote(out, q->final_out[p]) << "\n";
    for (State p = 0; p < a.num_states(); ++p)
      for (Letter x = 0; x < a.num_letters(); ++x)
        s << "edge " << p << " " << in.name(x) << " " << a.next(p, x) << " " << quote(out, q->output(p, x)) << "\n";
  } else if (auto* b = doc.get<Bimachine>()) {
    s << "left {\n";
    detail::print_det(s, b->left(), in, "  ");
    s << "}\nright {\n";
    detail::print_det(s, b->right(), in, "  ");
    s << "}\n";
    for (State l = 0; l < b->left().num_states(); ++l)
      for (Letter x = 0; x < b->num_letters(); ++x)
        for (State r = 0; r < b->right().num_states(); ++r)
          if (!b->out(l, x, r).empty())
            s << "out " << l << " " << in.name(x) << " " << r << " " << quote(out, b->out(l, x, r)) << "\n";
    for (State r : b->right().finals()) s << "lfinal " << r << " " << quote(out, b->lambda(r)) << "\n";
    for (State l : b->left().finals()) s << "rfinal " << l << " " << quote(out, b->rho(l)) << "\n";
  }
  return s.str();
}

}  // namespace ratfn
