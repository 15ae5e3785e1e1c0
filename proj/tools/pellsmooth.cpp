#include <string>
#include <vector>

#include "pellsmooth/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pellsmooth::dispatch(args);
}
