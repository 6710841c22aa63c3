#include "rmalock/bench/runner.hpp"

int main(int argc, char** argv) { return rmalock::bench::run_cli(argc, argv); }
