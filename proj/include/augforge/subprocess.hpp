#pragma once

#include <string>
#include <string_view>

namespace augforge {

struct SubprocessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string stdout_bytes;
};

/// Runs `sh -c command`, feeding stdin_bytes and capturing stdout (binary
/// safe). stderr passes through. On timeout the child is killed and
/// timed_out is set; exit_code is then meaningless.
SubprocessResult run_subprocess(const std::string& command,
                                std::string_view stdin_bytes,
                                double timeout_seconds);

} // namespace augforge
