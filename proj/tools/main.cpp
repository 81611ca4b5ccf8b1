#include "blockgen/cli.hpp"

int main(int argc, char** argv) { return blockgen::run_cli({argv + 1, argv + argc}); }
