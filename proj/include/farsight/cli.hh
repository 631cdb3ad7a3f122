#ifndef FARSIGHT_CLI_HH
#define FARSIGHT_CLI_HH

#include <iosfwd>
#include <string>
#include <vector>

namespace farsight
{
    inline constexpr int kExitOk = 0;
    inline constexpr int kExitDomainError = 1;
    inline constexpr int kExitUsageError = 2;

    /// `args` excludes the program name.
    auto run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int;
}

#endif
