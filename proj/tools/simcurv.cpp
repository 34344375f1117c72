#include "simcurv/cli.hpp"

int main(int argc, char** argv) { return simcurv::run_cli(argc, argv); }
