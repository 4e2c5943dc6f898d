#include "jcaco/cli.hpp"

int main(int argc, char** argv) { return jcaco::run_cli(argc, argv); }
