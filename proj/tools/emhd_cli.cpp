#include "emhd/io/cli.hpp"

int main(int argc, char** argv) { return emhd::io::run_cli(argc, argv); }
