#ifndef TLW_GRAMMAR_HPP
#define TLW_GRAMMAR_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlw/semiring.hpp"

namespace tlw {

/** The six disjoint symbol namespaces. */
enum class Ns : std::uint8_t {
  controllee_nt,     // controllee nonterminals / controllee stack symbols
  controller_nt,     // controller nonterminals / controller stack symbols
  terminal,
  label,
  controller_state,
  controllee_state,
};
inline constexpr int kNamespaceCount = 6;

/** Interns names per namespace. Ids are dense and start at 0. */
class SymbolTable {
 public:
  int intern(Ns ns, const std::string& name);
  /** Returns -1 if the name is not interned. */
  int find(Ns ns, const std::string& name) const;
  const std::string& name(Ns ns, int id) const;
  int size(Ns ns) const;
  bool valid(Ns ns, int id) const { return id >= 0 && id < size(ns); }
  /** Interns a new name `%base` (or `%base.2`, `%base.3`, ...). The `%`
   *  prefix cannot occur in hand-written grammar files. */
  int fresh(Ns ns, const std::string& base);

 private:
  struct Space {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;
  };
  std::array<Space, kNamespaceCount> spaces_;
};

using SymbolTablePtr = std::shared_ptr<SymbolTable>;

/** A right-hand-side element: a nonterminal of the grammar's own nonterminal
 *  namespace, or a terminal-like symbol (a terminal for controllees and plain
 *  WCFGs, a label for controllers). */
struct Sym {
  bool is_nt = true;
  int id = 0;
  friend bool operator==(const Sym& a, const Sym& b) {
    return a.is_nt == b.is_nt && a.id == b.id;
  }
};

struct WcfgProduction {
  int lhs = 0;
  std::vector<Sym> rhs;
  Weight weight;
};

struct WldcfgProduction {
  int label = 0;
  int lhs = 0;
  std::vector<Sym> rhs;
  /** 0 means no distinguished symbol; otherwise a 1-based rhs position. */
  int distinguished_index = 0;
  Weight weight;
};

struct WpdaTransition {
  int from = 0;
  std::vector<int> pop;
  /** Scanned symbol id (a label for controllers, a terminal otherwise),
   *  or -1 for none. */
  int scan = -1;
  int to = 0;
  std::vector<int> push;
  Weight weight;
};

struct WldpdaTransition {
  int label = 0;
  int from = 0;
  int pop = 0;
  int scan = -1;
  int to = 0;
  std::vector<int> push;
  int distinguished_index = 0;
  Weight weight;
};

enum class Variant : std::uint8_t { wcfg, wldcfg, wpda, wldpda };
/** Which side of a two-level pair a grammar plays. A standalone WCFG uses
 *  `controller` namespaces with `terminal` terminals. */
enum class Role : std::uint8_t { controller, controllee };

std::string to_string(Variant v);

struct GrammarSpec {
  Variant variant = Variant::wcfg;
  Role role = Role::controller;
  SymbolTablePtr symbols;
  /** Start nonterminal, or initial stack symbol for automata. */
  int start = 0;
  int init_state = 0;
  int final_state = 0;
  /** For a WCFG: whether rhs terminals are labels (controller) or terminals. */
  bool terminals_are_labels = true;
  /** Terminals declared by an `alphabet` line; empty means undeclared. */
  std::vector<int> declared_terminals;

  std::vector<WcfgProduction> cfg;
  std::vector<WldcfgProduction> ldcfg;
  std::vector<WpdaTransition> pda;
  std::vector<WldpdaTransition> ldpda;

  Ns nt_ns() const {
    return role == Role::controller ? Ns::controller_nt : Ns::controllee_nt;
  }
  Ns state_ns() const {
    return role == Role::controller ? Ns::controller_state : Ns::controllee_state;
  }
  /** Namespace of the grammar's terminal-like symbols. */
  Ns term_ns() const;
  std::size_t rule_count() const;
};

struct Violation {
  enum class Severity { error, warning } severity = Severity::error;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> entries;
  bool ok() const;
  std::vector<std::string> errors() const;
  std::vector<std::string> warnings() const;
};

ValidationReport validate(const GrammarSpec& g);

/** Pretty form of a rule, used in diagnostics. */
std::string describe_cfg(const GrammarSpec& g, const WcfgProduction& p);
std::string describe_ldcfg(const GrammarSpec& g, const WldcfgProduction& p);

}  // namespace tlw

#endif
