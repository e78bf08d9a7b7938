#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlw/allsum.hpp"
#include "tlw/errors.hpp"
#include "tlw/grammar_io.hpp"
#include "tlw/normal_forms.hpp"
#include "tlw/oracle.hpp"
#include "tlw/stringsum.hpp"

namespace tlw::cli {

using json = nlohmann::ordered_json;

namespace {

// Raised for usage problems found after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when allsum runs out of sweeps and --allow-diverged is absent.
struct Diverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string semiring = "real";
  bool semiring_given = false;
  bool json = false;
  std::string input;
  bool input_given = false;
  bool normalize = false;
  std::string chart_dump;
  std::string output;
  double tol = 1e-12;
  int max_sweeps = 10000;
  bool gauss_seidel = false;
  bool items = false;
  bool allow_diverged = false;
  int max_len = 6;
  int max_steps = 0;
};

json weight_json(const Semiring& sr, const Weight& w) {
  switch (sr.kind()) {
    case SemiringKind::boolean: return !sr.is_zero(w);
    case SemiringKind::counting:
      if (sr.is_infinite(w)) return "inf";
      return w.n;
    default: {
      double x = sr.to_double(w);
      if (std::isinf(x)) return "inf";
      return x;
    }
  }
}

// "aabb" is read one character per terminal; text with spaces is read one
// word per terminal.
std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  if (s.find_first_of(" \t") == std::string::npos) {
    for (char c : s) out.emplace_back(1, c);
    return out;
  }
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string yield_text(const TwoLevelGrammar& g, const std::vector<int>& s) {
  std::string out;
  bool spaced = false;
  for (int a : s) spaced = spaced || g.symbols->name(Ns::terminal, a).size() != 1;
  for (int a : s) {
    if (spaced && !out.empty()) out += " ";
    out += g.symbols->name(Ns::terminal, a);
  }
  return out;
}

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out, std::ostream& err)
      : opt_(opt), out_(out), err_(err), sr_(Semiring::from_name(opt.semiring)) {}

  void load() {
    file_ = load_path(opt_.file, sr_);
    for (const auto& w : file_.warnings) err_ << "warning: " << w << "\n";
    if (!file_.controller || !file_.controllee)
      throw UsageError("'" + opt_.file + "' needs both a controller and a controllee block");
  }

  TwoLevelGrammar merged() {
    TwoLevelGrammar g = control(*file_.controller, *file_.controllee);
    for (const auto& w : g.warnings) err_ << "warning: " << w << "\n";
    return g;
  }

  // The merged pair itself if it is already in normal form, otherwise the
  // converted pair.
  TwoLevelNF normal_form() {
    TwoLevelGrammar g = merged();
    try {
      return classify_nf(g);
    } catch (const NotNormalForm&) {
      return nf_convert_two_level(*file_.controller, *file_.controllee, solver()).nf;
    }
  }

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.tol = opt_.tol;
    cfg.max_sweeps = opt_.max_sweeps;
    cfg.gauss_seidel = opt_.gauss_seidel;
    return cfg;
  }

  std::vector<int> input(const TwoLevelGrammar& g) const {
    if (!opt_.input_given) throw UsageError("--input is required");
    return terminal_ids(g, tokens(opt_.input));
  }

  void validate() {
    load();
    TwoLevelGrammar g = merged();
    bool nf = true;
    std::vector<std::string> offending;
    try {
      classify_nf(g);
    } catch (const NotNormalForm& e) {
      nf = false;
      offending = e.offending();
    }
    if (opt_.json) {
      json j{{"ok", true},
             {"formalism", to_string(g.formalism)},
             {"rules", g.rules.size()},
             {"normal_form", nf},
             {"offending", offending},
             {"warnings", g.warnings}};
      out_ << j.dump(2) << "\n";
      return;
    }
    out_ << "ok: " << to_string(g.formalism) << ", " << g.rules.size() << " merged rules, "
         << (nf ? "normal form" : "not in normal form") << "\n";
    for (const auto& o : offending) out_ << "  " << o << "\n";
  }

  void normalize() {
    load();
    NfConversion c = nf_convert_two_level(*file_.controller, *file_.controllee, solver());
    std::string text = emit_file(c.pair, sr_);
    if (!opt_.output.empty()) {
      std::ofstream f(opt_.output);
      if (!f) throw InputError("cannot write '" + opt_.output + "'");
      f << text;
    }
    if (opt_.json) {
      json j{{"unchanged", c.unchanged},
             {"formalism", to_string(c.nf.formalism())},
             {"rules", c.nf.rules().size()},
             {"grammar", text}};
      out_ << j.dump(2) << "\n";
    } else if (opt_.output.empty()) {
      out_ << text;
    }
  }

  void stringsum() {
    load();
    TwoLevelNF nf = normal_form();
    std::vector<int> s = input(nf.grammar());
    Chart chart = fill_chart(nf, s, sr_);
    if (!opt_.chart_dump.empty()) {
      std::ofstream f(opt_.chart_dump);
      if (!f) throw InputError("cannot write '" + opt_.chart_dump + "'");
      f << chart_to_jsonl(nf.grammar(), chart, sr_);
    }
    if (opt_.json) {
      json j{{"semiring", sr_.name()},
             {"input", yield_text(nf.grammar(), s)},
             {"weight", weight_json(sr_, chart.goal)},
             {"text", sr_.format(chart.goal)},
             {"ungapped_items", chart.ungapped},
             {"gapped_items", chart.gapped}};
      out_ << j.dump(2) << "\n";
      return;
    }
    out_ << sr_.format(chart.goal) << "\n";
  }

  void allsum() {
    load();
    TwoLevelGrammar g = opt_.normalize
                            ? TwoLevelGrammar(nf_convert_two_level(*file_.controller,
                                                                   *file_.controllee, solver())
                                                  .nf.grammar())
                            : merged();
    AllsumOptions ao;
    ao.solver = solver();
    AllsumResult r = tlw::allsum(g, sr_, ao);
    const bool diverged = r.status == SolveStatus::diverged;
    if (diverged && !opt_.allow_diverged)
      throw Diverged("allsum did not converge within " + std::to_string(r.sweeps) +
                     " sweeps (last lower bound " + sr_.format(r.value) + ")");
    if (diverged) err_ << "warning: allsum diverged; reporting the last lower bound\n";
    if (opt_.json) {
      json j{{"semiring", sr_.name()},
             {"value", weight_json(sr_, r.value)},
             {"text", sr_.format(r.value)},
             {"status", diverged ? "diverged" : "converged"},
             {"sweeps", r.sweeps},
             {"items", r.items}};
      if (opt_.items) {
        json items = json::array();
        for (const auto& iv : r.item_values)
          items.push_back({{"item", describe_item(g, iv.item)}, {"value", weight_json(sr_, iv.value)}});
        j["item_values"] = std::move(items);
      }
      out_ << j.dump(2) << "\n";
      return;
    }
    out_ << sr_.format(r.value) << "\n";
    if (opt_.items) {
      for (const auto& iv : r.item_values)
        out_ << describe_item(g, iv.item) << "\t" << sr_.format(iv.value) << "\n";
    }
  }

  void enumerate() {
    load();
    TwoLevelGrammar g = merged();
    OracleOptions o;
    o.max_len = opt_.max_len;
    o.max_steps = opt_.max_steps > 0 ? opt_.max_steps : step_bound(opt_.max_len);
    EnumerateResult r = tlw::enumerate(g, sr_, o);
    if (!r.complete) err_ << "warning: the step budget cut some derivations short\n";
    if (opt_.json) {
      json strings = json::array();
      for (const auto& sw : r.strings)
        strings.push_back({{"string", yield_text(g, sw.yield)}, {"weight", weight_json(sr_, sw.weight)}});
      json j{{"semiring", sr_.name()},
             {"max_len", o.max_len},
             {"max_steps", o.max_steps},
             {"complete", r.complete},
             {"nodes", r.nodes},
             {"strings", std::move(strings)}};
      out_ << j.dump(2) << "\n";
      return;
    }
    for (const auto& sw : r.strings) {
      std::string y = yield_text(g, sw.yield);
      out_ << (y.empty() ? "(empty)" : y) << "\t" << sr_.format(sw.weight) << "\n";
    }
  }

  void best() {
    if (!opt_.semiring_given) sr_ = Semiring::viterbi();
    load();
    TwoLevelNF nf = normal_form();
    std::vector<int> s = input(nf.grammar());
    std::optional<BestDerivation> d = best_derivation(nf, s, sr_);
    if (opt_.json) {
      json j{{"semiring", sr_.name()}, {"found", d.has_value()}};
      if (d) {
        json rules = json::array();
        for (int i : d->rules) rules.push_back(describe_rule(nf.grammar(), nf.rules()[i]));
        j["weight"] = weight_json(sr_, d->weight);
        j["rules"] = std::move(rules);
      }
      out_ << j.dump(2) << "\n";
      return;
    }
    if (!d) {
      out_ << "no derivation\n";
      return;
    }
    out_ << sr_.format(d->weight) << "\n";
    for (int i : d->rules) out_ << "  " << describe_rule(nf.grammar(), nf.rules()[i]) << "\n";
  }

  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
  Semiring sr_;
  GrammarFile file_;
};

void print_error(std::ostream& err, const std::string& file, const std::exception& e) {
  err << "error: ";
  if (!file.empty()) err << file << ": ";
  err << e.what() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Weighted two-level grammars: normal forms, stringsums and allsums", "tlw"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "Grammar file")->required();
    sub->add_option("--semiring", opt.semiring, "boolean, real, counting or viterbi")
        ->check(CLI::IsMember({"boolean", "real", "counting", "viterbi"}))
        ->each([&](const std::string&) { opt.semiring_given = true; });
    sub->add_flag("--json", opt.json, "Machine-readable output");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--tol", opt.tol, "Relative convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", opt.max_sweeps, "Sweep budget")->check(CLI::Range(1, 1 << 30));
    sub->add_flag("--gauss-seidel", opt.gauss_seidel, "Use values from the current sweep");
  };
  auto input = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "Input string: one character per terminal, or "
                                          "space-separated terminal names")
        ->each([&](const std::string&) { opt.input_given = true; });
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a grammar file and report its shape");
  common(validate);
  CLI::App* normalize = app.add_subcommand("normalize", "Write an equivalent normal-form pair");
  common(normalize);
  solver(normalize);
  normalize->add_option("-o,--output", opt.output, "Write the grammar here instead of stdout");
  CLI::App* stringsum = app.add_subcommand("stringsum", "Total weight of one string");
  common(stringsum);
  input(stringsum);
  solver(stringsum);
  stringsum->add_option("--chart-dump", opt.chart_dump, "Write the chart as JSON lines to this file");
  CLI::App* allsum = app.add_subcommand("allsum", "Total weight of all derivations");
  common(allsum);
  solver(allsum);
  allsum->add_flag("--items", opt.items, "Also print every solved item");
  allsum->add_flag("--allow-diverged", opt.allow_diverged, "Report the lower bound instead of failing");
  allsum->add_flag("--normalize", opt.normalize, "Convert to normal form first");
  CLI::App* enumerate = app.add_subcommand("enumerate", "Brute-force derivation search");
  common(enumerate);
  enumerate->add_option("--max-len", opt.max_len, "Longest string")->check(CLI::Range(0, 64));
  enumerate->add_option("--max-steps", opt.max_steps, "Longest derivation (default: enough for "
                                                      "normal-form grammars)")
      ->check(CLI::NonNegativeNumber);
  CLI::App* best = app.add_subcommand("best", "Highest-weight derivation of one string");
  common(best);
  input(best);
  solver(best);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Runner r(opt, out, err);
    if (*validate) r.validate();
    if (*normalize) r.normalize();
    if (*stringsum) r.stringsum();
    if (*allsum) r.allsum();
    if (*enumerate) r.enumerate();
    if (*best) r.best();
    return 0;
  } catch (const NotNormalForm& e) {
    print_error(err, opt.file, e);
    for (const auto& o : e.offending()) err << "  " << o << "\n";
    return 1;
  } catch (const Diverged& e) {
    print_error(err, opt.file, e);
    return 1;
  } catch (const UnsupportedOperation& e) {
    print_error(err, opt.file, e);
    return 1;
  } catch (const ResourceExceeded& e) {
    print_error(err, opt.file, e);
    return 1;
  } catch (const TypeError& e) {
    print_error(err, opt.file, e);
    return 1;
  } catch (const LoadError& e) {
    err << "error: " << opt.file << ": invalid grammar\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return 2;
  } catch (const Error& e) {
    // SyntaxError (with line:column), InputError and other I/O problems.
    print_error(err, opt.file, e);
    return 2;
  } catch (const UsageError& e) {
    print_error(err, "", e);
    return 2;
  }
}

}  // namespace tlw::cli
