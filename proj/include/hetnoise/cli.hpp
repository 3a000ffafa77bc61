#pragma once

// Command-line front end. Every scenario key is also a flag (`--lo-power 2mW`,
// `--phase locked`), applied on top of `--scenario FILE` in command-line order.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a PASS band failed.

#include <string>

namespace hetnoise::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "HETNOISE_OUT_DIR";

int dispatch(int argc, char** argv);

/// Flag spelling of a scenario key: `lo_power` -> `--lo-power`.
std::string flag_for_key(const std::string& key);

} // namespace hetnoise::cli
