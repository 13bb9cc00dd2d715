#include "nnjump/cli/run.hpp"

int main(int argc, char** argv) { return nnjump::cli::run(argc, argv); }
