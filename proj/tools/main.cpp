#include "dunedetect/cli.hpp"

int main(int argc, char** argv) { return dunedetect::run(argc, argv); }
