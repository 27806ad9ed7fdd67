#include <vector>

#include "lexforest/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lexf::cli_main(args);
}
