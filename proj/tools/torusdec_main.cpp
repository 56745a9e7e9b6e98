#include "torusdec/harness.hpp"

int main(int argc, char** argv) { return torusdec::harness::cli_main(argc, argv); }
