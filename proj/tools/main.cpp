#include <iostream>
#include <string>
#include <vector>

#include "lgcol/cli.hpp"

int main(int argc, char ** argv)
{
  return lgcol::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
