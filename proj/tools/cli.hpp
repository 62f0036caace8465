#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ratfn/ratfn.hpp"

namespace ratfn::cli {

enum ExitCode : int { kSuccess = 0, kNegative = 1, kFailure = 2 };

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline std::string read_source(const std::string& path, std::istream& in) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(in), {});
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), {});
}

inline Transducer as_transducer(const MachineDocument& d) {
  if (auto* t = d.get<Transducer>()) return *t;
  if (auto* s = d.get<SequentialTransducer>()) return to_transducer(*s);
  if (auto* b = d.get<Bimachine>()) return to_transducer(*b);
  throw Error(std::string("expected a transducer, got a ") + kind_name(d.kind()));
}

inline Bimachine as_bimachine(const MachineDocument& d) {
  if (auto* b = d.get<Bimachine>()) return *b;
  return transducer_to_bimachine(as_transducer(d));
}

inline SequentialTransducer as_sequential(const MachineDocument& d, std::size_t budget) {
  if (auto* s = d.get<SequentialTransducer>()) return *s;
  return determinize_transducer(as_transducer(d), budget);
}

inline TransitionMonoid monoid_of(const MachineDocument& d) {
  if (auto* a = d.get<Nfa>()) return transition_monoid(*a);
  if (auto* r = d.get<RightAutomaton>()) return transition_monoid(*r);
  if (auto* t = d.get<Transducer>()) return transition_monoid(t->underlying());
  if (auto* s = d.get<SequentialTransducer>()) return transition_monoid(s->automaton);
  return bimachine_monoid(std::get<Bimachine>(d.machine));
}

inline MachineDocument with(const MachineDocument& d, Bimachine b) {
  return MachineDocument{d.input, d.output, std::move(b)};
}

inline std::string quoted(const Alphabet& a, const Word& w) { return "\"" + a.format(w) + "\""; }

inline void print_matrix(std::ostream& out, const BoolMatrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out << " " << i << "->{";
    bool first = true;
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (!m.get(i, j)) continue;
      out << (first ? "" : ",") << j;
      first = false;
    }
    out << "}";
  }
}

inline std::optional<Word> evaluate(const MachineDocument& d, const Word& w) {
  if (auto* b = d.get<Bimachine>()) return eval(*b, w);
  EvalResult r = d.get<SequentialTransducer>() ? eval(*d.get<SequentialTransducer>(), w) : eval(as_transducer(d), w);
  if (auto* nf = std::get_if<NotFunctionalWitness>(&r)) {
    throw NotFunctionalInput("two runs give \"" + d.output.format(nf->first) + "\" and \"" +
                             d.output.format(nf->second) + "\"");
  }
  if (auto* o = std::get_if<Word>(&r)) return *o;
  return std::nullopt;
}

inline int run(const std::vector<std::string>& args, Io io) {
  CLI::App app{"Rational word functions: sequential and bimachine minimisation, canonical and minimal "
               "bimachines, class membership."};
  app.name("ratfn");
  app.require_subcommand(1);
  std::size_t budget = 0;
  if (const char* env = std::getenv("RATFN_BUDGET")) budget = std::strtoul(env, nullptr, 10);
  app.add_option("--budget", budget, "Enumeration budget in states (determinize: delay-state budget)");

  std::string file, file2, word_text, class_text, method = "search", part = "bimachine";
  std::size_t max_len = 4;
  auto file_arg = [&](CLI::App* sub) { sub->add_option("file", file, "Machine document, '-' for stdin")->required(); };

  auto* c_eval = app.add_subcommand("eval", "Evaluate a transducer, sequential transducer or bimachine");
  file_arg(c_eval);
  c_eval->add_option("word", word_text, "Input word")->required();
  auto* c_func = app.add_subcommand("check-functional", "Decide functionality of a transducer");
  file_arg(c_func);
  auto* c_equiv = app.add_subcommand("equiv", "Decide equivalence of two functional machines");
  file_arg(c_equiv);
  c_equiv->add_option("file2", file2)->required();
  auto* c_det = app.add_subcommand("determinize", "Sequential transducer for a sequential function");
  file_arg(c_det);
  auto* c_minseq = app.add_subcommand("min-seq", "Minimal sequential transducer");
  file_arg(c_minseq);
  auto* c_tobim = app.add_subcommand("to-bimachine", "Bimachine for a functional transducer");
  file_arg(c_tobim);
  auto* c_totr = app.add_subcommand("to-transducer", "Unambiguous transducer for a bimachine");
  file_arg(c_totr);
  auto* c_minl = app.add_subcommand("min-left", "Left minimisation");
  file_arg(c_minl);
  auto* c_minr = app.add_subcommand("min-right", "Right minimisation");
  file_arg(c_minr);
  auto* c_min = app.add_subcommand("minimize", "Right minimisation of the left minimisation");
  file_arg(c_min);
  auto* c_canon = app.add_subcommand("canonical", "Canonical bimachine or canonical automata");
  file_arg(c_canon);
  c_canon->add_option("--part", part, "bimachine, right or left")->check(CLI::IsMember({"bimachine", "right", "left"}));
  auto* c_minset = app.add_subcommand("minimal-set", "All minimal bimachines up to isomorphism");
  file_arg(c_minset);
  auto* c_monoid = app.add_subcommand("monoid", "Transition monoid and its class memberships");
  file_arg(c_monoid);
  auto* c_member = app.add_subcommand("membership", "Is the machine's transition monoid in the class");
  file_arg(c_member);
  c_member->add_option("--class", class_text)->required();
  auto* c_decide = app.add_subcommand("decide", "Is the realised function in the class");
  file_arg(c_decide);
  c_decide->add_option("--class", class_text)->required();
  c_decide->add_option("--method", method)->check(CLI::IsMember({"search", "bfc"}));
  auto* c_aper = app.add_subcommand("is-aperiodic-fn", "Is the function realised by a bimachine aperiodic");
  file_arg(c_aper);
  auto* c_gadget = app.add_subcommand("run-gadget", "Bimachine printing the run of a complete automaton");
  file_arg(c_gadget);
  auto* c_label = app.add_subcommand("label", "Labelling transducer of a right automaton");
  file_arg(c_label);
  auto* c_oracle = app.add_subcommand("oracle", "Tabulate the function on all short words");
  file_arg(c_oracle);
  c_oracle->add_option("file2", file2, "Second machine to compare against");
  c_oracle->add_option("--max-len", max_len);

  std::vector<std::string> argv_store{"ratfn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, io.out, io.err);
    return code == 0 ? kSuccess : kFailure;
  }

  std::size_t enum_budget = budget ? budget : kDefaultEnumerationBudget;
  std::size_t delay_budget = budget ? budget : kDefaultDelayBudget;
  auto& out = io.out;
  auto load = [&](const std::string& path) { return parse_machine(read_source(path, io.in)); };
  auto emit = [&](const MachineDocument& d) { out << print_machine(d); };
  auto need_class = [&]() {
    auto c = parse_class(class_text);
    if (!c) throw Error("unknown class '" + class_text + "' (finite, aperiodic, da, jtrivial, idempotent)");
    return *c;
  };

  try {
    if (c_eval->parsed()) {
      auto d = load(file);
      auto w = d.input.parse(word_text);
      if (!w) throw Error("cannot read '" + word_text + "' over the input alphabet");
      auto o = evaluate(d, *w);
      if (!o) {
        out << "undefined\n";
        return kNegative;
      }
      out << quoted(d.output, *o) << "\n";
      return kSuccess;
    }
    if (c_func->parsed()) {
      auto d = load(file);
      auto r = check_functional(as_transducer(d));
      if (r.functional) {
        out << "functional\n";
        return kSuccess;
      }
      out << "not functional\nwitness " << quoted(d.input, *r.witness) << "\n";
      return kNegative;
    }
    if (c_equiv->parsed()) {
      auto d1 = load(file), d2 = load(file2);
      auto r = check_equivalent(as_transducer(d1), as_transducer(d2));
      if (r.equivalent) {
        out << "equivalent\n";
        return kSuccess;
      }
      out << "not equivalent\nwitness " << quoted(d1.input, *r.witness) << "\n";
      return kNegative;
    }
    if (c_det->parsed()) {
      auto d = load(file);
      emit({d.input, d.output, determinize_transducer(as_transducer(d), delay_budget)});
      return kSuccess;
    }
    if (c_minseq->parsed()) {
      auto d = load(file);
      emit({d.input, d.output, minimize_sequential(as_sequential(d, delay_budget))});
      return kSuccess;
    }
    if (c_tobim->parsed()) {
      auto d = load(file);
      emit(with(d, transducer_to_bimachine(as_transducer(d))));
      return kSuccess;
    }
    if (c_totr->parsed()) {
      auto d = load(file);
      emit({d.input, d.output, as_transducer(d)});
      return kSuccess;
    }
    if (c_minl->parsed() || c_minr->parsed() || c_min->parsed()) {
      auto d = load(file);
      Bimachine b = as_bimachine(d);
      Bimachine r = c_minl->parsed() ? left_minimize(b) : c_minr->parsed() ? right_minimize(b) : minimize_bimachine(b);
      emit(with(d, std::move(r)));
      return kSuccess;
    }
    if (c_canon->parsed()) {
      auto d = load(file);
      Bimachine b = minimize_bimachine(as_bimachine(d));
      if (part == "right") {
        emit({d.input, d.output, canonical_right_of(b).automaton});
      } else if (part == "left") {
        emit({d.input, d.output, to_nfa(canonical_left_of(b))});
      } else {
        emit(with(d, canonical_bimachine_of(b)));
      }
      return kSuccess;
    }
    if (c_minset->parsed()) {
      auto d = load(file);
      auto all = minimal_bimachines_of(minimize_bimachine(as_bimachine(d)), enum_budget);
      out << "# " << all.size() << " minimal bimachine" << (all.size() == 1 ? "" : "s") << "\n";
      for (std::size_t i = 0; i < all.size(); ++i) {
        out << "\n# minimal bimachine " << i + 1 << ": left " << all[i].left().num_states() << " states, right "
            << all[i].right().num_states() << " states\n";
        emit(with(d, all[i]));
      }
      return kSuccess;
    }
    if (c_monoid->parsed()) {
      auto d = load(file);
      auto m = monoid_of(d);
      out << "size " << m.size() << "\n";
      for (Letter a = 0; a < m.num_generators(); ++a) out << "generator " << d.input.name(a) << " " << m.generator(a) << "\n";
      for (Element x = 0; x < m.size(); ++x) {
        out << "element " << x << " " << quoted(d.input, m.representative(x)) << " :";
        print_matrix(out, m.matrix(x));
        out << "\n";
      }
      for (auto c : {MonoidClass::Finite, MonoidClass::Aperiodic, MonoidClass::DA, MonoidClass::JTrivial,
                     MonoidClass::Idempotent}) {
        out << "class " << class_name(c) << " " << (class_membership(m, c) ? "yes" : "no") << "\n";
      }
      return kSuccess;
    }
    if (c_member->parsed()) {
      auto c = need_class();
      auto d = load(file);
      bool yes = class_membership(monoid_of(d), c);
      out << (yes ? "yes" : "no") << "\n";
      return yes ? kSuccess : kNegative;
    }
    if (c_decide->parsed()) {
      auto c = need_class();
      auto d = load(file);
      Bimachine b = minimize_bimachine(as_bimachine(d));
      if (method == "search") {
        auto all = minimal_bimachines_of(b, enum_budget);
        for (const auto& m : all) {
          if (in_class(m, c)) {
            out << "yes\n# minimal bimachine in class " << class_name(c) << "\n";
            emit(with(d, m));
            return kSuccess;
          }
        }
        out << "no\n# none of the " << all.size() << " minimal bimachines is in class " << class_name(c) << "\n";
        return kNegative;
      }
      auto bv = class_bimachine_of(b, c, enum_budget);
      if (bv && in_class(*bv, c)) {
        out << "yes\n# class bimachine\n";
        emit(with(d, *bv));
        return kSuccess;
      }
      out << "no\n";
      return kNegative;
    }
    if (c_aper->parsed()) {
      auto d = load(file);
      bool yes = is_aperiodic_function(as_bimachine(d));
      out << (yes ? "yes" : "no") << "\n";
      return yes ? kSuccess : kNegative;
    }
    if (c_gadget->parsed()) {
      auto d = load(file);
      auto* a = d.get<Nfa>();
      if (!a) throw Error("run-gadget expects an automaton");
      auto b = run_output_bimachine(*a);
      emit({d.input, run_output_alphabet(a->num_states()), std::move(b)});
      return kSuccess;
    }
    if (c_label->parsed()) {
      auto d = load(file);
      auto* r = d.get<RightAutomaton>();
      if (!r) throw Error("label expects a right automaton");
      auto t = labelling_transducer(*r);
      emit({d.input, labelling_alphabet(d.input, canonical(*r).num_states()), std::move(t)});
      return kSuccess;
    }
    if (c_oracle->parsed()) {
      auto d = load(file);
      std::optional<MachineDocument> d2;
      if (!file2.empty()) d2 = load(file2);
      for (const Word& w : words_up_to(d.input.size(), max_len)) {
        auto o = evaluate(d, w);
        if (d2) {
          auto o2 = evaluate(*d2, w);
          if (o != o2) {
            out << "disagree on " << quoted(d.input, w) << ": " << (o ? quoted(d.output, *o) : "undefined") << " vs "
                << (o2 ? quoted(d2->output, *o2) : "undefined") << "\n";
            return kNegative;
          }
          continue;
        }
        out << quoted(d.input, w) << " -> " << (o ? quoted(d.output, *o) : "undefined") << "\n";
      }
      if (d2) out << "agree on all words up to length " << max_len << "\n";
      return kSuccess;
    }
  } catch (const ParseError& e) {
    io.err << "parse error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace ratfn::cli
