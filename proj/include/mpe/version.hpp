#pragma once

// =============================================================================
// Library version string, embedded in generated CSV metadata headers.
// =============================================================================

namespace mpe {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mpe
