#include "gamecond/cli.hpp"

int main(int argc, char** argv) { return gamecond::cli::run(argc, argv); }
