#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace edgelab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Per-module versions embedded in every output file; bump a module's entry
/// whenever its numerical output can change.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kModuleVersions{{
    {"potential", "1"},
    {"equilibrium", "1"},
    {"orthopoly", "1"},
    {"airy", "1"},
    {"fredholm", "1"},
    {"diagnostics", "1"},
    {"cli", "1"},
}};

}  // namespace edgelab
