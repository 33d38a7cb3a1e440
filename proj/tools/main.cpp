#include "tsra/cli.hpp"

int main(int argc, char** argv) { return tsra::cli_main(argc, argv); }
