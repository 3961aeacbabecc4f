#include "ddsim/cli.hpp"

int main(int argc, char** argv) { return ddsim::cli::cli_run(argc, argv); }
