#pragma once

#include <iosfwd>

namespace galab::cli {

/// galab <pipeline> --scenario FILE... [--out DIR] [--grid NX,NY] [--tol T]
///       [--order K] [--jobs N] [--list-scenarios]
///
/// `pipeline` is one of the scenario pipelines or `run`, which accepts any.
/// Returns 0 when every scenario passes, 1 on configuration errors and 2
/// when an assertion fails or a module raises.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace galab::cli
