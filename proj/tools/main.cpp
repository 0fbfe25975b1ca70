#include "pgap_cli/cli.hpp"

int main(int argc, char** argv) { return pgap::cli::main_entry(argc, argv); }
