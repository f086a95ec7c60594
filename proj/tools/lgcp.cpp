#include "lgcp/cli.hpp"

int main(int argc, char** argv) { return lgcp::cli::run(argc, argv); }
