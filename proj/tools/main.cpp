#include <vector>

#include "tsdelay/cli.hpp"

int main(int argc, char** argv) {
    return tsdelay::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
