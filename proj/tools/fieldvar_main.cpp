#include "fieldvar/cli.hpp"

int main(int argc, char** argv) {
    return fieldvar::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
