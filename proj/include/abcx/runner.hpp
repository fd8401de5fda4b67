#pragma once

#include <cstdint>
#include <optional>
#include <string>

// Batch commands behind the CLI verbs. Each returns a process exit code:
// 0 success, 1 configuration/validation error, 2 check failure, 3 a check
// was skipped for budget reasons (verify only).

namespace abcx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitSkipped = 3;

struct RunOptions {
    std::string config_path;
    std::optional<std::string> out_dir;           // overrides output.dir
    std::optional<std::uint64_t> seed_override;   // overrides simulation.seed
    int threads = 1;
};

int cmd_exponents(const RunOptions& options);
int cmd_simulate(const RunOptions& options);
int cmd_sweep(const RunOptions& options);
int cmd_verify(const RunOptions& options);

}  // namespace abcx
