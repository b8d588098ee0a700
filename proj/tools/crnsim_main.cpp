#include <string>
#include <vector>

#include "crnsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return crnsim::run_cli(args);
}
