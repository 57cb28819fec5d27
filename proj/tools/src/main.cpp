#include <iostream>

#include "sigraph_tools/app.hpp"

int main(int argc, char** argv) { return sigraph::tools::run_app(argc, argv, std::cout, std::cerr); }
