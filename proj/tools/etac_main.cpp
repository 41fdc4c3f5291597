#include "etac/cli.hpp"

int main(int argc, char** argv) {
    return etac::run_cli(argc, argv);
}
