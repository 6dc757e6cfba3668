#include "navfuse/cli.hpp"

int main(int argc, char** argv) { return navfuse::run_cli(argc, argv); }
