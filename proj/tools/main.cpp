// SPDX-License-Identifier: Apache-2.0
#include <climits>
#include <iostream>
#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    std::string self = argv[0];
    char buf[PATH_MAX];
    ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (n > 0) self.assign(buf, static_cast<std::size_t>(n));
    std::vector<std::string> args(argv + 1, argv + argc);
    return mcpsolver::cli::run(args, self, std::cin, std::cout, std::cerr);
}
