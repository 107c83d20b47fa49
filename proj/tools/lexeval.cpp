#include "lexeval/cli.hpp"

int main(int argc, char** argv) { return lexeval::run_cli(argc, argv); }
