#include "tlw/grammar_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tlw/errors.hpp"

namespace tlw {

bool is_reserved_name(const std::string& name) {
  return name.find('%') != std::string::npos;
}

namespace {

enum class Tok { ident, label_str, term_str, arrow, colon, comma, at, star, number };

struct Token {
  Tok kind;
  std::string text;
  int col;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '%' || c == '.' || c == '^' ||
         c == '|' || c == '$' || c == '{' || c == '}' || c >= 0x80;
}

std::vector<Token> tokenize(const std::string& line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Tok::arrow, "->", col});
      i += 2;
      continue;
    }
    if (c == ':') { out.push_back({Tok::colon, ":", col}); ++i; continue; }
    if (c == ',') { out.push_back({Tok::comma, ",", col}); ++i; continue; }
    if (c == '@') { out.push_back({Tok::at, "@", col}); ++i; continue; }
    if (c == '*') { out.push_back({Tok::star, "*", col}); ++i; continue; }
    if (c == '"' || c == '\'') {
      std::size_t end = line.find(static_cast<char>(c), i + 1);
      if (end == std::string::npos)
        throw SyntaxError(lineno, col, "unterminated quoted symbol");
      std::string body = line.substr(i + 1, end - i - 1);
      if (body.empty()) throw SyntaxError(lineno, col, "empty quoted symbol");
      out.push_back({c == '"' ? Tok::label_str : Tok::term_str, body, col});
      i = end + 1;
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      bool numeric = std::isdigit(c) || c == '.';
      while (j < line.size()) {
        unsigned char d = static_cast<unsigned char>(line[j]);
        // Exponent signs belong to the number, as in 1e-05.
        bool exp_sign = numeric && (d == '-' || d == '+') && j > i &&
                        (line[j - 1] == 'e' || line[j - 1] == 'E');
        if (!ident_char(d) && !exp_sign) break;
        ++j;
      }
      out.push_back({Tok::ident, line.substr(i, j - i), col});
      i = j;
      continue;
    }
    throw SyntaxError(lineno, col, std::string("unexpected character '") +
                                       static_cast<char>(c) + "'");
  }
  return out;
}

class Parser {
 public:
  Parser(const Semiring& sr) : sr_(sr) {
    file_.symbols = std::make_shared<SymbolTable>();
  }

  GrammarFile run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      line_ = lineno;
      toks_ = tokenize(line, lineno);
      pos_ = 0;
      if (toks_.empty()) continue;
      handle_line();
    }
    finish_block();
    if (!file_.controller && !file_.controllee)
      throw SyntaxError(lineno == 0 ? 1 : 1, 1, "no grammar block");
    validate_all();
    return std::move(file_);
  }

 private:
  // ---- token helpers ----
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek() const { return toks_[pos_]; }
  int col() const {
    if (at_end()) return toks_.empty() ? 1 : toks_.back().col + 1;
    return peek().col;
  }
  [[noreturn]] void fail(const std::string& m) const { throw SyntaxError(line_, col(), m); }
  bool accept(Tok k) {
    if (!at_end() && peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const char* what) {
    if (at_end() || peek().kind != k) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }
  std::string ident(const char* what) {
    const Token& t = expect(Tok::ident, what);
    check_name(t.text, t.col);
    return t.text;
  }
  void check_name(const std::string& name, int c) const {
    if (!file_.generated && is_reserved_name(name))
      throw SyntaxError(line_, c, "'%' is reserved for generated symbols");
  }
  bool is_word(const char* w) const {
    return !at_end() && peek().kind == Tok::ident && peek().text == w;
  }

  SymbolTable& syms() { return *file_.symbols; }

  // ---- lines ----
  void handle_line() {
    if (is_word("pragma")) {
      ++pos_;
      std::string what = ident("pragma name");
      if (what != "generated") fail("unknown pragma '" + what + "'");
      if (cur_) fail("pragma must precede every block");
      file_.generated = true;
      end_of_line();
      return;
    }
    if (is_word("controller") || is_word("controllee") || is_word("grammar")) {
      header();
      return;
    }
    if (!cur_) fail("rule outside of a grammar block");
    if (is_word("alphabet") && pos_ + 1 < toks_.size() &&
        toks_[pos_ + 1].kind == Tok::term_str) {
      ++pos_;
      while (!at_end()) {
        const Token& t = expect(Tok::term_str, "quoted terminal");
        check_name(t.text, t.col);
        cur_->declared_terminals.push_back(syms().intern(Ns::terminal, t.text));
      }
      return;
    }
    switch (cur_->variant) {
      case Variant::wcfg: cfg_rule(); break;
      case Variant::wldcfg: ldcfg_rule(); break;
      case Variant::wpda: pda_rule(); break;
      case Variant::wldpda: ldpda_rule(); break;
    }
  }

  void end_of_line() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }

  void header() {
    finish_block();
    std::string side = peek().text;
    ++pos_;
    std::string kind = ident("block kind");
    GrammarSpec g;
    g.symbols = file_.symbols;
    if (side == "grammar") {
      if (kind != "cfg") fail("a standalone grammar block must be 'cfg'");
      g.variant = Variant::wcfg;
      g.role = Role::controller;
      g.terminals_are_labels = false;
    } else if (side == "controller") {
      g.role = Role::controller;
      if (kind == "cfg") g.variant = Variant::wcfg;
      else if (kind == "pda") g.variant = Variant::wpda;
      else fail("controller block must be 'cfg' or 'pda'");
    } else {
      g.role = Role::controllee;
      if (kind == "ldcfg") g.variant = Variant::wldcfg;
      else if (kind == "ldpda") g.variant = Variant::wldpda;
      else fail("controllee block must be 'ldcfg' or 'ldpda'");
    }
    if (g.variant == Variant::wcfg || g.variant == Variant::wldcfg) {
      if (ident("'start'") != "start") fail("expected 'start'");
      g.start = syms().intern(g.nt_ns(), ident("start symbol"));
    } else {
      if (ident("'init'") != "init") fail("expected 'init'");
      g.init_state = syms().intern(g.state_ns(), ident("initial state"));
      g.start = syms().intern(g.nt_ns(), ident("initial stack symbol"));
      if (ident("'final'") != "final") fail("expected 'final'");
      g.final_state = syms().intern(g.state_ns(), ident("final state"));
    }
    end_of_line();
    bool is_controller = side != "controllee";
    if ((is_controller && file_.controller) || (!is_controller && file_.controllee))
      throw SyntaxError(line_, 1, "duplicate " + std::string(is_controller ? "controller" : "controllee") + " block");
    cur_ = std::move(g);
  }

  void finish_block() {
    if (!cur_) return;
    if (cur_->role == Role::controller)
      file_.controller = std::move(*cur_);
    else
      file_.controllee = std::move(*cur_);
    cur_.reset();
  }

  Weight weight_clause() {
    if (!accept(Tok::at)) return sr_.one();
    if (at_end() || peek().kind != Tok::ident) fail("expected a weight after '@'");
    const Token& t = peek();
    ++pos_;
    const std::string& s = t.text;
    if (file_.generated && s == "inf") return sr_.infinity();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    bool decimal = !s.empty() && end == s.c_str() + s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.');
    if (!decimal) throw SyntaxError(line_, t.col, "malformed weight '" + s + "'");
    try {
      if (file_.generated && sr_.kind() == SemiringKind::counting &&
          v == std::floor(v) && v >= 0 && v < 9.2e18)
        return sr_.from_count(static_cast<std::uint64_t>(std::llround(v)));
      return sr_.from_double(v);
    } catch (const InputError& e) {
      throw SyntaxError(line_, t.col, e.what());
    }
  }

  // Scan clause: `scan "l"` (controller) or `scan 'a'` (controllee).
  int scan_clause() {
    if (!is_word("scan")) return -1;
    ++pos_;
    if (at_end()) fail("expected a scanned symbol");
    const Token& t = peek();
    ++pos_;
    check_name(t.text, t.col);
    if (cur_->role == Role::controller) {
      if (t.kind != Tok::label_str)
        throw SyntaxError(line_, t.col, "a controller scans a double-quoted label");
      return syms().intern(Ns::label, t.text);
    }
    if (t.kind != Tok::term_str)
      throw SyntaxError(line_, t.col, "a controllee scans a single-quoted terminal");
    return syms().intern(Ns::terminal, t.text);
  }

  // Right-hand side up to '@', 'scan' or end of line. Returns symbols and the
  // 1-based distinguished index (0 if none).
  std::pair<std::vector<Sym>, int> rhs(bool allow_star, bool allow_terms) {
    std::vector<Sym> out;
    int dist = 0;
    while (!at_end() && peek().kind != Tok::at && !is_word("scan")) {
      bool star = accept(Tok::star);
      if (star && !allow_star) fail("'*' is only allowed in controllee rules");
      if (at_end()) fail("expected a symbol after '*'");
      const Token& t = peek();
      ++pos_;
      check_name(t.text, t.col);
      Sym s;
      if (t.kind == Tok::ident) {
        s = {true, syms().intern(cur_->nt_ns(), t.text)};
      } else if (t.kind == Tok::label_str || t.kind == Tok::term_str) {
        if (!allow_terms) throw SyntaxError(line_, t.col, "automaton stacks hold only stack symbols");
        if (star) throw SyntaxError(line_, t.col, "only a nonterminal can be distinguished");
        Ns want = cur_->term_ns();
        if ((want == Ns::label) != (t.kind == Tok::label_str)) {
          throw SyntaxError(line_, t.col,
                            want == Ns::label
                                ? "controller terminals are double-quoted labels"
                                : "terminals are single-quoted");
        }
        s = {false, syms().intern(want, t.text)};
      } else {
        throw SyntaxError(line_, t.col, "unexpected '" + t.text + "'");
      }
      if (star) {
        if (dist != 0) throw SyntaxError(line_, t.col, "more than one distinguished symbol");
        dist = static_cast<int>(out.size()) + 1;
      }
      out.push_back(s);
    }
    return {out, dist};
  }

  int label_prefix() {
    if (at_end()) fail("expected a label");
    const Token& t = peek();
    if (t.kind != Tok::ident && t.kind != Tok::label_str) fail("expected a label");
    ++pos_;
    check_name(t.text, t.col);
    expect(Tok::colon, "':' after the label");
    return syms().intern(Ns::label, t.text);
  }

  void cfg_rule() {
    WcfgProduction p;
    p.lhs = syms().intern(cur_->nt_ns(), ident("left-hand side"));
    expect(Tok::arrow, "'->'");
    p.rhs = rhs(false, true).first;
    p.weight = weight_clause();
    end_of_line();
    cur_->cfg.push_back(std::move(p));
  }

  void ldcfg_rule() {
    WldcfgProduction p;
    p.label = label_prefix();
    p.lhs = syms().intern(cur_->nt_ns(), ident("left-hand side"));
    expect(Tok::arrow, "'->'");
    auto [r, d] = rhs(true, true);
    p.rhs = std::move(r);
    p.distinguished_index = d;
    p.weight = weight_clause();
    end_of_line();
    cur_->ldcfg.push_back(std::move(p));
  }

  // from , pop... -> to , push...
  void pda_core(int& from, std::vector<int>& pop, int& to, std::vector<int>& push,
                int& dist, bool allow_star) {
    from = syms().intern(cur_->state_ns(), ident("source state"));
    expect(Tok::comma, "','");
    while (!at_end() && peek().kind == Tok::ident)
      pop.push_back(syms().intern(cur_->nt_ns(), ident("stack symbol")));
    expect(Tok::arrow, "'->'");
    to = syms().intern(cur_->state_ns(), ident("target state"));
    expect(Tok::comma, "','");
    auto [r, d] = rhs(allow_star, false);
    for (const Sym& s : r) push.push_back(s.id);
    dist = d;
  }

  void tail(Weight& w, int& scan) {
    bool have_w = false, have_scan = false;
    w = sr_.one();
    scan = -1;
    while (!at_end()) {
      if (peek().kind == Tok::at && !have_w) {
        w = weight_clause();
        have_w = true;
      } else if (is_word("scan") && !have_scan) {
        scan = scan_clause();
        have_scan = true;
      } else {
        fail("unexpected '" + peek().text + "'");
      }
    }
  }

  void pda_rule() {
    WpdaTransition t;
    int dist = 0;
    pda_core(t.from, t.pop, t.to, t.push, dist, false);
    tail(t.weight, t.scan);
    cur_->pda.push_back(std::move(t));
  }

  void ldpda_rule() {
    WldpdaTransition t;
    t.label = label_prefix();
    std::vector<int> pop;
    pda_core(t.from, pop, t.to, t.push, t.distinguished_index, true);
    if (pop.size() != 1) fail("a controllee transition pops exactly one symbol");
    t.pop = pop[0];
    tail(t.weight, t.scan);
    cur_->ldpda.push_back(std::move(t));
  }

  void validate_all() {
    std::vector<std::string> errors;
    auto run = [&](const std::optional<GrammarSpec>& g, const char* name) {
      if (!g) return;
      ValidationReport r = validate(*g);
      for (auto& e : r.errors()) errors.push_back(std::string(name) + ": " + e);
      for (auto& w : r.warnings()) file_.warnings.push_back(std::string(name) + ": " + w);
    };
    run(file_.controller, "controller");
    run(file_.controllee, "controllee");
    if (!errors.empty()) throw LoadError(std::move(errors));
  }

  const Semiring& sr_;
  GrammarFile file_;
  std::optional<GrammarSpec> cur_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

std::string weight_text(const Semiring& sr, const Weight& w) {
  switch (sr.kind()) {
    case SemiringKind::boolean: return sr.is_zero(w) ? "0.0" : "1.0";
    case SemiringKind::counting:
      if (sr.is_infinite(w)) return "inf";
      if (w.n <= 1) return w.n == 0 ? "0.0" : "1.0";
      return std::to_string(w.n);
    default: {
      if (sr.is_infinite(w)) return "inf";
      // Shortest text that reads back to the same double.
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, w.x);
      std::string s(buf, res.ptr);
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      return s;
    }
  }
}

std::string quote_term(const GrammarSpec& g, int id) {
  if (g.term_ns() == Ns::label) return "\"" + g.symbols->name(Ns::label, id) + "\"";
  return "'" + g.symbols->name(Ns::terminal, id) + "'";
}

}  // namespace

GrammarFile load_text(std::string_view text, const Semiring& sr) {
  Parser p(sr);
  return p.run(text);
}

GrammarFile load_path(const std::string& path, const Semiring& sr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_text(ss.str(), sr);
}

GrammarSpec load_grammar(std::string_view text, const Semiring& sr) {
  GrammarFile f = load_text(text, sr);
  if (f.controller && f.controllee)
    throw InputError("expected a single grammar block, found two");
  return f.controller ? std::move(*f.controller) : std::move(*f.controllee);
}

std::string emit(const GrammarSpec& g, const Semiring& sr) {
  const SymbolTable& t = *g.symbols;
  std::ostringstream o;
  auto nt = [&](int id) { return t.name(g.nt_ns(), id); };
  auto st = [&](int id) { return t.name(g.state_ns(), id); };
  switch (g.variant) {
    case Variant::wcfg:
      o << (g.role == Role::controller && g.terminals_are_labels ? "controller cfg"
                                                                  : "grammar cfg")
        << " start " << nt(g.start) << "\n";
      break;
    case Variant::wldcfg: o << "controllee ldcfg start " << nt(g.start) << "\n"; break;
    case Variant::wpda:
      o << "controller pda init " << st(g.init_state) << " " << nt(g.start)
        << " final " << st(g.final_state) << "\n";
      break;
    case Variant::wldpda:
      o << "controllee ldpda init " << st(g.init_state) << " " << nt(g.start)
        << " final " << st(g.final_state) << "\n";
      break;
  }
  if (!g.declared_terminals.empty()) {
    o << "alphabet";
    for (int a : g.declared_terminals) o << " '" << t.name(Ns::terminal, a) << "'";
    o << "\n";
  }
  auto rhs = [&](const std::vector<Sym>& r, int dist) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      o << " ";
      if (static_cast<int>(i) + 1 == dist) o << "*";
      o << (r[i].is_nt ? nt(r[i].id) : quote_term(g, r[i].id));
    }
  };
  for (const auto& p : g.cfg) {
    o << nt(p.lhs) << " ->";
    rhs(p.rhs, 0);
    o << " @ " << weight_text(sr, p.weight) << "\n";
  }
  for (const auto& p : g.ldcfg) {
    o << t.name(Ns::label, p.label) << " : " << nt(p.lhs) << " ->";
    rhs(p.rhs, p.distinguished_index);
    o << " @ " << weight_text(sr, p.weight) << "\n";
  }
  for (const auto& p : g.pda) {
    o << st(p.from) << " ,";
    for (int s : p.pop) o << " " << nt(s);
    o << " -> " << st(p.to) << " ,";
    for (int s : p.push) o << " " << nt(s);
    o << " @ " << weight_text(sr, p.weight);
    if (p.scan >= 0) o << " scan " << quote_term(g, p.scan);
    o << "\n";
  }
  for (const auto& p : g.ldpda) {
    o << t.name(Ns::label, p.label) << " : " << st(p.from) << " , " << nt(p.pop)
      << " -> " << st(p.to) << " ,";
    for (std::size_t i = 0; i < p.push.size(); ++i) {
      o << " ";
      if (static_cast<int>(i) + 1 == p.distinguished_index) o << "*";
      o << nt(p.push[i]);
    }
    o << " @ " << weight_text(sr, p.weight);
    if (p.scan >= 0) o << " scan '" << t.name(Ns::terminal, p.scan) << "'";
    o << "\n";
  }
  return o.str();
}

std::string emit_file(const GrammarFile& f, const Semiring& sr) {
  std::string out;
  bool generated = f.generated;
  if (generated) out += "pragma generated\n";
  if (f.controller) out += emit(*f.controller, sr);
  if (f.controllee) out += emit(*f.controllee, sr);
  return out;
}

}  // namespace tlw
