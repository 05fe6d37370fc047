#include <actsem/cli.hpp>

int main(int argc, char** argv) { return actsem::cli::run(argc, argv); }
