#include <iostream>

#include "cogradio/cli.hpp"

int main(int argc, char** argv) { return cogradio::cli_main(argc, argv, std::cout, std::cerr); }
