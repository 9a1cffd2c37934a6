#pragma once

namespace augforge::harness {

/// Entry point behind tools/augforge. Exit codes: 0 success, 1 validation
/// error (bad flags, bad configs, unsatisfied preconditions), 2 runtime
/// failure. AUGFORGE_SEED in the environment is the fallback seed when
/// --seed is not given.
int cli(int argc, const char* const* argv);

} // namespace augforge::harness
