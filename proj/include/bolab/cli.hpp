#pragma once

namespace bolab {

/// Entry point behind the bolab binary. Exit codes: 0 all verdicts passed,
/// 1 usage/config/runtime error, 2 at least one verdict failed.
int run(int argc, const char* const* argv);

}  // namespace bolab
