#ifndef TLW_GRAMMAR_IO_HPP
#define TLW_GRAMMAR_IO_HPP

#include <optional>
#include <string>
#include <string_view>

#include "tlw/grammar.hpp"

namespace tlw {

/** Parsed contents of a grammar file: a controller block, a controllee
 *  block, or a standalone `grammar cfg` block. All blocks share one
 *  symbol table so that controller labels and controllee labels agree. */
struct GrammarFile {
  SymbolTablePtr symbols;
  std::optional<GrammarSpec> controller;
  std::optional<GrammarSpec> controllee;
  /** Set by `pragma generated`; permits reserved `%` names. */
  bool generated = false;
  std::vector<std::string> warnings;
};

/** Parses grammar text. Throws SyntaxError (with line/column) on malformed
 *  text and LoadError when a block fails validation. */
GrammarFile load_text(std::string_view text, const Semiring& sr);
GrammarFile load_path(const std::string& path, const Semiring& sr);

/** Loads text that must contain exactly one block and returns it. */
GrammarSpec load_grammar(std::string_view text, const Semiring& sr);

/** Writes one block in the file format. */
std::string emit(const GrammarSpec& g, const Semiring& sr);
/** Writes every block of `f` (and the pragma line if needed). */
std::string emit_file(const GrammarFile& f, const Semiring& sr);

/** True if `name` contains the reserved prefix character. */
bool is_reserved_name(const std::string& name);

}  // namespace tlw

#endif
