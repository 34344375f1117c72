#pragma once

#include <iostream>
#include <string_view>

#include "simcurv/system.hpp"

namespace simcurv {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidationFailed = 1, kExitNumerical = 2, kExitBadInput = 3 };

/// Lift from its command-line form: h_eps | h0 | asym:K | family:c=v[,v...] | const:v[,v...].
IvfPtr parse_lift(const SystemPtr& system, std::string_view spec);

/// Entry point of the simcurv command-line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace simcurv
