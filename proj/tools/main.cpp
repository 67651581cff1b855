#include "skeleform/cli.hpp"

int main(int argc, char** argv) { return skeleform::cli_main(argc, argv); }
