#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uvesc::cli {

/// Entry point of the `uvesc` tool. args excludes the program name.
/// Returns 0 on success, 1 on validation or simulation failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uvesc::cli
