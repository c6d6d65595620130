#include "qphase/cli.hpp"

int main(int argc, char** argv) { return qphase::cli::parse_and_dispatch(argc, argv); }
