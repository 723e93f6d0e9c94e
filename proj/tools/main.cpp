#include "cli.hpp"

int main(int argc, char** argv) { return cascade::cli_main(argc, argv); }
