#pragma once

namespace ineqcert::cli {

/// Entry point of ineq-certify. Returns 0 on success, 1 on usage or
/// configuration errors and 2 when a certificate or check fails.
int run_cli(int argc, const char* const* argv);

}  // namespace ineqcert::cli
