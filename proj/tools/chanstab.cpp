#include "chanstab/commands.hpp"

int main(int argc, char** argv) { return chanstab::cli_main(argc, argv); }
