#include "mirrornm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mirrornm::cli::main_entry(argc, argv, std::cout, std::cerr);
}
