#include "qpspec/cli.hpp"

int main(int argc, char** argv) { return qpspec::cli::run_main(argc, argv); }
