#include "cyberirl/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return cyberirl::run_cli(argc, argv, std::cout, std::cerr);
}
