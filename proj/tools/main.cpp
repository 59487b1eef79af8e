#include "urbanswarm/cli.hpp"

int main(int argc, char** argv) { return urbanswarm::cli::dispatch(argc, argv); }
