#pragma once

namespace eor {

// Command-line front end; returns the process exit code
// (0 ok, 2 input error, 3 constraint error, 4 numerical failure).
int runCli(int argc, const char* const* argv);

}  // namespace eor
