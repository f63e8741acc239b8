#include <iostream>
#include <string>
#include <vector>

#include "skillforge/cli.hpp"

int main(int argc, char** argv) {
    return skillforge::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
