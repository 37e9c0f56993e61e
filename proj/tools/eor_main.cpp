#include "eor/cli.hpp"

int main(int argc, char** argv) { return eor::runCli(argc, argv); }
