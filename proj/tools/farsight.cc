#include <farsight/cli.hh>

#include <iostream>

auto main(int argc, char * argv[]) -> int
{
    return farsight::run_cli({ argv + 1, argv + argc }, std::cout, std::cerr);
}
