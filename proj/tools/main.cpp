#include "cli.hpp"

int main(int argc, char** argv) { return pdm::cli::run(std::vector<std::string>(argv, argv + argc)); }
