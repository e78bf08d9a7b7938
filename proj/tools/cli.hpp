#ifndef TLW_TOOLS_CLI_HPP
#define TLW_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace tlw::cli {

/** Runs the command line `args` (without the program name) and returns the
 *  exit code: 0 on success, 1 on domain errors, 2 on usage and I/O errors. */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlw::cli

#endif
