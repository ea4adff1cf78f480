#pragma once

namespace parttrack {

// Full command-line surface; returns the process exit code
// (0 success, 1 usage error, 2 data error).
int run_cli(int argc, const char* const* argv);

}  // namespace parttrack
