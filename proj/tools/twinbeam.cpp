#include <string>
#include <vector>

#include "twinbeam/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return twinbeam::cli::cli_main(args);
}
