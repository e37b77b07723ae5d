#include "polydiv/cli.hpp"

int main(int argc, char** argv) { return polydiv::cli::main(argc, argv); }
