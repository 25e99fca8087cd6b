#include "egorank/cli.hpp"

int main(int argc, char** argv) {
    return egorank::run_cli(argc, argv);
}
