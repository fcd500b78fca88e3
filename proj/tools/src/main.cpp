#include "lcrip/cli.hpp"

int main(int argc, char** argv) { return lcrip::cli::run(argc, argv); }
