/**
 * @file qakh_main.cpp
 * @brief Entry point of the qakh command.
 */
#include <iostream>

#include "qakh/cli.hpp"

int main(int argc, char** argv) { return qakh::cli_main(argc, argv, std::cout, std::cerr); }
