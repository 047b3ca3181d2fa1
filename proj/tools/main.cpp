#include <iostream>

#include "rankone/cli.hpp"

int main(int argc, char** argv) {
    return rankone::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
