#include "nlt/cli.hpp"

int main(int argc, char** argv) { return nlt::cli_main(argc, argv); }
