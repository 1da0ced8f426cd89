#include "nlvar/cli.hpp"

int main(int argc, char** argv) { return nlvar::run_cli(argc, argv); }
