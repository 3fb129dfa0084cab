#include "sharpk/cli.hpp"

int main(int argc, char** argv) { return sharpk::cli::run(argc, argv); }
