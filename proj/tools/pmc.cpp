#include "pmc/cli.hpp"

int main(int argc, char** argv) { return pmc::run_cli(argc, argv); }
