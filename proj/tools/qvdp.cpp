#include "qvdp/cli.hpp"

int main(int argc, char** argv) { return qvdp::cli::main(argc, argv); }
