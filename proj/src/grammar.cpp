#include "tlw/grammar.hpp"

#include <algorithm>
#include <map>

#include "tlw/errors.hpp"

namespace tlw {

int SymbolTable::intern(Ns ns, const std::string& name) {
  Space& sp = spaces_[static_cast<int>(ns)];
  auto it = sp.ids.find(name);
  if (it != sp.ids.end()) return it->second;
  int id = static_cast<int>(sp.names.size());
  sp.names.push_back(name);
  sp.ids.emplace(name, id);
  return id;
}

int SymbolTable::find(Ns ns, const std::string& name) const {
  const Space& sp = spaces_[static_cast<int>(ns)];
  auto it = sp.ids.find(name);
  return it == sp.ids.end() ? -1 : it->second;
}

const std::string& SymbolTable::name(Ns ns, int id) const {
  const Space& sp = spaces_[static_cast<int>(ns)];
  if (id < 0 || id >= static_cast<int>(sp.names.size())) {
    static const std::string unknown = "<?>";
    return unknown;
  }
  return sp.names[id];
}

int SymbolTable::size(Ns ns) const {
  return static_cast<int>(spaces_[static_cast<int>(ns)].names.size());
}

int SymbolTable::fresh(Ns ns, const std::string& base) {
  std::string stem = (!base.empty() && base[0] == '%') ? base : "%" + base;
  std::string name = stem;
  for (int k = 2; find(ns, name) >= 0; ++k) name = stem + "." + std::to_string(k);
  return intern(ns, name);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::wcfg: return "wcfg";
    case Variant::wldcfg: return "wldcfg";
    case Variant::wpda: return "wpda";
    case Variant::wldpda: return "wldpda";
  }
  return "?";
}

Ns GrammarSpec::term_ns() const {
  if (role == Role::controllee) return Ns::terminal;
  return terminals_are_labels ? Ns::label : Ns::terminal;
}

std::size_t GrammarSpec::rule_count() const {
  switch (variant) {
    case Variant::wcfg: return cfg.size();
    case Variant::wldcfg: return ldcfg.size();
    case Variant::wpda: return pda.size();
    case Variant::wldpda: return ldpda.size();
  }
  return 0;
}

bool ValidationReport::ok() const {
  return std::none_of(entries.begin(), entries.end(), [](const Violation& v) {
    return v.severity == Violation::Severity::error;
  });
}

std::vector<std::string> ValidationReport::errors() const {
  std::vector<std::string> out;
  for (const auto& v : entries)
    if (v.severity == Violation::Severity::error) out.push_back(v.message);
  return out;
}

std::vector<std::string> ValidationReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& v : entries)
    if (v.severity == Violation::Severity::warning) out.push_back(v.message);
  return out;
}

namespace {

std::string sym_text(const GrammarSpec& g, const Sym& s) {
  const SymbolTable& t = *g.symbols;
  if (s.is_nt) return t.name(g.nt_ns(), s.id);
  if (g.term_ns() == Ns::label) return "\"" + t.name(Ns::label, s.id) + "\"";
  return "'" + t.name(Ns::terminal, s.id) + "'";
}

class Checker {
 public:
  explicit Checker(const GrammarSpec& g) : g_(g), t_(*g.symbols) {}

  void error(std::string m) {
    report_.entries.push_back({Violation::Severity::error, std::move(m)});
  }
  void warning(std::string m) {
    report_.entries.push_back({Violation::Severity::warning, std::move(m)});
  }

  void nt(int id, const std::string& where) {
    if (!t_.valid(g_.nt_ns(), id))
      error(where + ": unknown nonterminal id " + std::to_string(id));
  }
  void state(int id, const std::string& where) {
    if (!t_.valid(g_.state_ns(), id))
      error(where + ": unknown state id " + std::to_string(id));
  }
  void label(int id, const std::string& where) {
    if (!t_.valid(Ns::label, id))
      error(where + ": unknown label id " + std::to_string(id));
  }
  void term(int id, const std::string& where) {
    Ns ns = g_.term_ns();
    if (!t_.valid(ns, id)) {
      error(where + ": unknown terminal id " + std::to_string(id));
      return;
    }
    if (ns == Ns::terminal && !g_.declared_terminals.empty() &&
        std::find(g_.declared_terminals.begin(), g_.declared_terminals.end(),
                  id) == g_.declared_terminals.end()) {
      error(where + ": undeclared terminal '" + t_.name(Ns::terminal, id) + "'");
    }
  }
  void rhs(const std::vector<Sym>& r, const std::string& where) {
    for (const Sym& s : r) {
      if (s.is_nt)
        nt(s.id, where);
      else
        term(s.id, where);
    }
  }

  void run() {
    nt(g_.start, "start symbol");
    if (g_.variant == Variant::wpda || g_.variant == Variant::wldpda) {
      state(g_.init_state, "initial state");
      state(g_.final_state, "final state");
    }
    switch (g_.variant) {
      case Variant::wcfg: cfg(); break;
      case Variant::wldcfg: ldcfg(); break;
      case Variant::wpda: pda(); break;
      case Variant::wldpda: ldpda(); break;
    }
  }

  ValidationReport take() { return std::move(report_); }

 private:
  void cfg() {
    for (std::size_t i = 0; i < g_.cfg.size(); ++i) {
      const auto& p = g_.cfg[i];
      std::string where = "production " + std::to_string(i + 1);
      nt(p.lhs, where);
      rhs(p.rhs, where);
    }
  }

  void ldcfg() {
    std::map<int, int> label_lhs;
    for (std::size_t i = 0; i < g_.ldcfg.size(); ++i) {
      const auto& p = g_.ldcfg[i];
      std::string where = "production " + std::to_string(i + 1);
      label(p.label, where);
      nt(p.lhs, where);
      rhs(p.rhs, where);
      int d = p.distinguished_index;
      if (d < 0 || d > static_cast<int>(p.rhs.size())) {
        error(where + ": distinguished index " + std::to_string(d) +
              " is out of range");
      } else if (d > 0 && !p.rhs[d - 1].is_nt) {
        error(where + ": distinguished index points at terminal " +
              sym_text(g_, p.rhs[d - 1]));
      }
      conflict(label_lhs, p.label, p.lhs, where);
    }
  }

  void pda() {
    for (std::size_t i = 0; i < g_.pda.size(); ++i) {
      const auto& t = g_.pda[i];
      std::string where = "transition " + std::to_string(i + 1);
      state(t.from, where);
      state(t.to, where);
      if (t.pop.size() != 1)
        error(where + ": pops " + std::to_string(t.pop.size()) +
              " symbols but a top-down automaton must pop exactly one");
      for (int s : t.pop) nt(s, where);
      for (int s : t.push) nt(s, where);
      if (t.scan >= 0) term(t.scan, where);
    }
  }

  void ldpda() {
    std::map<int, int> label_lhs;
    for (std::size_t i = 0; i < g_.ldpda.size(); ++i) {
      const auto& t = g_.ldpda[i];
      std::string where = "transition " + std::to_string(i + 1);
      label(t.label, where);
      state(t.from, where);
      state(t.to, where);
      nt(t.pop, where);
      for (int s : t.push) nt(s, where);
      if (t.scan >= 0) term(t.scan, where);
      int d = t.distinguished_index;
      if (d < 0 || d > static_cast<int>(t.push.size()))
        error(where + ": distinguished index " + std::to_string(d) +
              " is out of range");
      conflict(label_lhs, t.label, t.pop, where);
    }
  }

  void conflict(std::map<int, int>& seen, int label, int lhs,
                const std::string& where) {
    auto [it, inserted] = seen.emplace(label, lhs);
    if (!inserted && it->second != lhs) {
      warning(where + ": label \"" + t_.name(Ns::label, label) +
              "\" is shared by rules with different left-hand sides");
    }
  }

  const GrammarSpec& g_;
  const SymbolTable& t_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const GrammarSpec& g) {
  if (!g.symbols) {
    ValidationReport r;
    r.entries.push_back({Violation::Severity::error, "grammar has no symbol table"});
    return r;
  }
  Checker c(g);
  c.run();
  return c.take();
}

std::string describe_cfg(const GrammarSpec& g, const WcfgProduction& p) {
  std::string s = g.symbols->name(g.nt_ns(), p.lhs) + " ->";
  for (const Sym& r : p.rhs) s += " " + sym_text(g, r);
  return s;
}

std::string describe_ldcfg(const GrammarSpec& g, const WldcfgProduction& p) {
  std::string s = g.symbols->name(Ns::label, p.label) + " : " +
                  g.symbols->name(g.nt_ns(), p.lhs) + " ->";
  for (std::size_t i = 0; i < p.rhs.size(); ++i) {
    s += " ";
    if (static_cast<int>(i) + 1 == p.distinguished_index) s += "*";
    s += sym_text(g, p.rhs[i]);
  }
  return s;
}

}  // namespace tlw
