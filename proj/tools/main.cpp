#include "cli.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    const char* env = std::getenv("NCRING_CONFIG");
    return ncring::cli::run(args, std::cout, std::cerr, env ? env : "");
}
