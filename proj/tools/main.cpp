#include "syncvision/cli.hpp"

int main(int argc, char** argv) { return syncvision::cli::run(argc, argv); }
