#pragma once

#include <ostream>

namespace mlqst::cli {

// Entry point shared by the executable and the tests. Returns the process
// exit code; diagnostics go to `err` as "error: code=<Code> <message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mlqst::cli
