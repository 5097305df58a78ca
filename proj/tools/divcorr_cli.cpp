#include "cli_commands.hpp"

int main(int argc, char **argv) { return divcorr::cli::run(argc, argv); }
