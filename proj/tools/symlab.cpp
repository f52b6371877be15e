#include "symlab/cli.hpp"

int main(int argc, char** argv) { return symlab::cli::main(argc, argv); }
