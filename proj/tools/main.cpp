#include "sinv/commands.hpp"

int main(int argc, char** argv) { return sinv::run_command(argc, argv); }
