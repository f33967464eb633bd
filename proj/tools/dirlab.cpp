#include "dirlab/cli.hpp"

int main(int argc, char** argv) { return dirlab::cli_main(argc, argv); }
