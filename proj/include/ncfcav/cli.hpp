#pragma once

// Command-line frontend. Exit codes: 0 success, 2 configuration error,
// 3 numerical or fit failure, 4 internal invariant violation.

namespace ncfcav
{
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInvariant = 4;

int run_cli(int argc, char **argv);

} // namespace ncfcav
