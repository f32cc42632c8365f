#include "lp_cli.hpp"

int main(int argc, char** argv) { return lp_cli::run(argc, argv); }
