#include <vector>

#include "nrq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nrq::run_command(args);
}
