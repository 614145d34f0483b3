#include "drcolor/cli.hpp"

int main(int argc, char** argv) { return drcolor::cli_main(argc, argv); }
