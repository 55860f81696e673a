#include "stdec/cli.hpp"

int main(int argc, char** argv) { return stdec::cli::run_cli(argc, argv); }
