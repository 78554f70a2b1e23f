#pragma once

namespace hiersim::cli {

/// Full command-line front end. Returns the process exit status: 0 on
/// success, 1 on a configuration fault, 2 on a runtime fault.
int run_main(int argc, const char* const* argv);

} // namespace hiersim::cli
