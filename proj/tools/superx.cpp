#include "superx/commands.hpp"

int main(int argc, char** argv) { return superx::run_cli(argc, argv); }
