#include "hornlab/cli.hpp"

int main(int argc, char** argv) { return hornlab::cli::main(argc, argv); }
