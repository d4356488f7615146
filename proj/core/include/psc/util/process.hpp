#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace psc::util {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs `argv` (argv[0] looked up on PATH), feeding `input` on stdin and
/// capturing stdout/stderr. The child is killed when `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout);

}  // namespace psc::util
