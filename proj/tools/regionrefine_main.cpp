#include "regionrefine/cli.hpp"

int main(int argc, char** argv) { return rr::cli::run(argc, argv); }
