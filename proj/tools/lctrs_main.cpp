#include "lctrs/cli.hpp"

int main(int argc, char** argv) { return lctrs::run_cli(argc, argv); }
