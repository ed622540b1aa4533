#include "tpk/cli.hpp"

int main(int argc, char** argv) { return tpk::parse_and_dispatch(argc, argv); }
