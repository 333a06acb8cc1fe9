#include "flexbench/io/cli.hpp"

int main(int argc, char** argv) { return flexbench::run_cli(argc, argv); }
