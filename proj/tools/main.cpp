#include "synctrans/cli.hpp"

int main(int argc, char** argv) { return synctrans::run_cli(argc, argv); }
