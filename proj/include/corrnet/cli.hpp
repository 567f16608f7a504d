#pragma once

namespace corrnet {

// Parses and executes one invocation. Returns 0 on success, 2 on invalid
// input or configuration, 3 on numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace corrnet
