#include "parttrack/cli.hpp"

int main(int argc, char** argv) { return parttrack::run_cli(argc, argv); }
