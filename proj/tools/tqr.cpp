#include "tqr/cli/app.hpp"

int main(int argc, char** argv) { return tqr::cli::run(argc, argv); }
