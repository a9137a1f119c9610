#include "commands.hpp"

int main(int argc, char** argv) { return ineqcert::cli::run_cli(argc, argv); }
