#pragma once
// ddes-kit command-line front end.
//
// Exit codes: 0 success, 1 data error (some record or metric failed),
// 2 configuration error (bad flags, unreadable side inputs, invalid params).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ddes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitConfig = 2;

/// Worker count: DDES_KIT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t worker_count();

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddes::cli
