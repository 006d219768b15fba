#include "cascada/cli.hpp"

int main(int argc, char** argv) { return cascada::cli::run(argc, argv); }
