#pragma once

namespace divcorr::cli {

/// Exit codes: 0 success, 1 identity failure, 2 config parse error, 3 precondition error.
int run(int argc, char **argv);

} // namespace divcorr::cli
