#include "windplan/harness.hpp"

int main(int argc, char** argv) { return windplan::cli_main(argc, argv); }
