#pragma once

namespace mobgen::cli {

/// Entry point behind the mobgen binary; exposed so tests can drive the real
/// command surface. Returns the process exit code: 0 success, 1 user error
/// (flags, config, paths), 2 internal failure.
int run(int argc, const char* const* argv);

}  // namespace mobgen::cli
