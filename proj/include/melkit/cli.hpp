#pragma once

namespace melkit {

// Entry point behind the command-line binary; returns the process exit
// code (0 success, 1 verification failure, 2 usage or domain error).
int run_cli(int argc, const char* const* argv);

} // namespace melkit
