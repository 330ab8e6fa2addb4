#include "bolab/cli.hpp"

int main(int argc, char** argv) { return bolab::run(argc, argv); }
