#include "melkit/cli.hpp"

int main(int argc, char** argv) { return melkit::run_cli(argc, argv); }
