#include "pipeline.hpp"

int main(int argc, char** argv) { return owl2vec4oa::cli::run_cli(argc, argv); }
