#include "dcepcc/cli.hpp"

int main(int argc, char** argv) { return dcepcc::cli::run(argc, argv); }
