#include "tmss/cli.hpp"

int main(int argc, char** argv) { return tmss::cli::run(argc, argv); }
