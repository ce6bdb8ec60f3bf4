#include "sicyig/cli.hpp"

int main(int argc, char** argv) { return sicyig::cli::run(argc, argv); }
