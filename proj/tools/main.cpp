#include "corrnet/cli.hpp"

int main(int argc, char** argv) { return corrnet::run_cli(argc, argv); }
