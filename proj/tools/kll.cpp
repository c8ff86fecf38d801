#include "kll/harness.hpp"

int main(int argc, char** argv) { return kll::run_cli(argc, argv); }
