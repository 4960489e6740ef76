#include "cli.hpp"

int main(int argc, char** argv) { return mih::cli::run(argc, argv); }
