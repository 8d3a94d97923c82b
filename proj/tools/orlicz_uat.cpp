#include <iostream>

#include "ouat/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ouat::dispatch(args, std::cout, std::cerr);
}
