#include "zenoguard/cli.hpp"

int main(int argc, char** argv) { return zenoguard::cli::main(argc, argv); }
