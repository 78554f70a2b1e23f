#include "hiersim/cli.hpp"

int main(int argc, char** argv) {
    return hiersim::cli::run_main(argc, argv);
}
