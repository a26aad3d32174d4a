#include "starnet_cli.hpp"

int main(int argc, char** argv) { return starnet::cli::run(argc, argv); }
