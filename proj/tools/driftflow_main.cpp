#include "driftflow/cli.hpp"

int main(int argc, char** argv) { return driftflow::run_cli(argc, argv); }
