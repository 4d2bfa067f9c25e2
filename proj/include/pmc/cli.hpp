#pragma once

#include <string>
#include <vector>

namespace pmc {

/// Entry point of the `pmc` tool; returns the process exit code
/// (0 ok, 2 contract, 3 conditioning, 4 approximate-controllability,
/// 64 usage).
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

} // namespace pmc
