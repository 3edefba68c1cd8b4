#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lseq::cli {

// Runs the `lseq` command line (args[0] is the program name). Returns the
// process exit code: 0 on full success, 1 on failure, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lseq::cli
