#include "cli.hpp"

int main(int argc, char** argv) { return muss::cli::run(argc, argv); }
