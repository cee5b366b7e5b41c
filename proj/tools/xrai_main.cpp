#include "xrai/io/cli.hpp"

int main(int argc, char** argv) { return xrai::io::cli_main(argc, argv); }
