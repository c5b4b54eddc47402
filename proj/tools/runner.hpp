#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace flatdyn::runner {

// Evaluates job(0..count-1) on `workers` threads and returns the records in
// sample order. Each job must be a pure function of its index (seed its own
// rng via sample_rng), so the result is independent of the worker count.
std::vector<std::string> parallel_samples(
    std::size_t count, int workers,
    const std::function<std::string(std::size_t)>& job);

// Full CLI entry point, callable in-process by tests. argv[0] is skipped.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

} // namespace flatdyn::runner
