#pragma once

namespace mih::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kNumericalFailure = 3 };

int run(int argc, const char* const* argv);

}  // namespace mih::cli
