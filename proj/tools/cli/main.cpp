#include "commands.hpp"

int main(int argc, char** argv) { return slitflow::cli::run_main(argc, argv); }
