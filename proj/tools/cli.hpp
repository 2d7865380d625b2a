#pragma once

namespace muss::cli {

// Exit codes: 0 success, 1 usage error, 2 runtime/data error,
// 3 bound violation (verify only).
int run(int argc, const char* const* argv);

}  // namespace muss::cli
