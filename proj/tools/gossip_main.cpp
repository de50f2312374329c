#include "gossip/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return gossip::cli::main_entry(argc, argv, std::cout, std::cerr);
}
