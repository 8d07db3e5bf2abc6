#include "paoi/cli/run.hpp"

int main(int argc, char** argv) { return paoi::cli::main_entry(argc, argv); }
