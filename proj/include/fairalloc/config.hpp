#pragma once

#include "fairalloc/methods.hpp"

#include <cstdint>
#include <string>

namespace fairalloc {

// Everything a run needs beyond the input files. JSON shape:
//   {
//     "method": "four",
//     "policy": "largest_account" | "rotation" | "random",
//     "rotation_cycle": 0,
//     "seed": 42,
//     "four": {
//       "k": 2, "mode": "proportional" | "corrective", "probe": "1.00",
//       "nmax": 12, "weights": {"enabled": false, "frequency": "per_fill"}
//     }
//   }
// Every key is optional; unknown keys are rejected so typos cannot silently
// fall back to defaults. probe accepts a decimal currency string or a whole
// number of currency units.
struct RunConfig {
    std::string method = "four";
    std::string policy = "largest_account";
    int rotation_cycle = 0;        // 0 = advance per trading day
    std::uint64_t seed = 0;        // random residual policy stream
    FourOptions four;

    // Fresh policy instance per run, built from the fields above.
    ResidualPolicy make_policy() const;
};

RunConfig parse_config(const std::string& json_text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

}  // namespace fairalloc
