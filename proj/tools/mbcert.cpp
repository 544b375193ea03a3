#include "mbc/cli.hpp"

int main(int argc, char** argv) { return mbc::run(argc, argv); }
