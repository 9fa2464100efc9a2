// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_CLI_HPP
#define PRAC_CLI_HPP

#include <iosfwd>

namespace prac {

// Subcommands: run, transfer, report, verify.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prac

#endif  // PRAC_CLI_HPP
