#include "brq/cli.hpp"

int main(int argc, char** argv) { return brq::cli::run(argc, argv); }
