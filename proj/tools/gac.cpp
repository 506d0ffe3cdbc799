#include "gac/cli.hpp"

int main(int argc, char** argv) { return gac::cli::dispatch(argc, argv); }
