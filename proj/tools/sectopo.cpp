#include "sectopo/io/cli.hpp"

int main(int argc, char** argv) { return sectopo::io::run(argc, argv); }
