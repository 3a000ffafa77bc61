#include "hetnoise/cli.hpp"

int main(int argc, char** argv) { return hetnoise::cli::dispatch(argc, argv); }
