#include "uvscatter/cli.hpp"

int main(int argc, char** argv) { return uvscatter::cli::run(argc, argv); }
