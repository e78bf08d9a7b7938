#ifndef TLW_ERRORS_HPP
#define TLW_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace tlw {

/** Base class of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Operands drawn from two different semiring instances. */
class TypeError : public Error {
 public:
  using Error::Error;
};

/** Operation that the chosen semiring cannot support (e.g. star without
 *  omega-continuity, best derivation in a non-idempotent semiring). */
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/** Malformed grammar text. Line and column are 1-based. */
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/** A grammar parsed but failed validation; carries every violation. */
class LoadError : public Error {
 public:
  explicit LoadError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

/** A rule set that is required to be in normal form but is not. */
class NotNormalForm : public Error {
 public:
  explicit NotNormalForm(std::vector<std::string> offending)
      : Error("not in normal form: " + first(offending)),
        offending_(std::move(offending)) {}
  const std::vector<std::string>& offending() const { return offending_; }

 private:
  static std::string first(const std::vector<std::string>& v) {
    if (v.empty()) return "(no details)";
    std::string s = v.front();
    if (v.size() > 1) s += " (+" + std::to_string(v.size() - 1) + " more)";
    return s;
  }
  std::vector<std::string> offending_;
};

/** The brute-force search exceeded its node cap. */
class ResourceExceeded : public Error {
 public:
  using Error::Error;
};

/** Bad input to a computation, such as a terminal outside the alphabet. */
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlw

#endif
