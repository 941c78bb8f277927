#include "cli/commands.hpp"

int main(int argc, char** argv) { return deadbeat::cli::run_cli(argc, argv); }
