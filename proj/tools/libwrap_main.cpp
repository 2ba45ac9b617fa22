#include "libwrap/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    libwrap::CommandEnv env = libwrap::CommandEnv::from_environment(std::cout, std::cerr);
    return libwrap::run_cli(std::vector<std::string>(argv + 1, argv + argc), env);
}
