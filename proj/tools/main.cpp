#include "augforge/harness/cli.hpp"

int main(int argc, char** argv) {
    return augforge::harness::cli(argc, argv);
}
