#include "config.hpp"

int main(int argc, char** argv) { return dntcli::main_entry(argc, argv); }
