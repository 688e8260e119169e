#include "ptbox/cli.hpp"

int main(int argc, char** argv) {
    return ptbox::cli::main_entry(argc, argv);
}
