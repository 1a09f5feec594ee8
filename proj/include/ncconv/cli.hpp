#ifndef NCCONV_CLI_HPP
#define NCCONV_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ncconv {

// Command-line front end. Exit codes: 0 success, 2 parse/domain error,
// 3 convergence error, 4 verification failure, 1 anything else.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace ncconv

#endif
