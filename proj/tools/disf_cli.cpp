#include "disf/commands.hpp"

int main(int argc, char** argv) { return disf::cli::run(argc, argv); }
