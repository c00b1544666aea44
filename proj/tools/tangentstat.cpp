#include "tangentstat/cli.hpp"

int main(int argc, char** argv) { return tangentstat::cli::main_entry(argc, argv); }
