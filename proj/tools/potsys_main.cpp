#include "potsys/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return potsys::run_main(argc, argv, std::cout, std::cerr);
}
