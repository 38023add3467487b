#include "interfall/cli.hpp"

int main(int argc, char** argv) { return interfall::cli::run(argc, argv); }
