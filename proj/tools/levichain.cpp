#include "levichain/cli.hpp"

int main(int argc, char** argv) { return levichain::run_cli(argc, argv); }
