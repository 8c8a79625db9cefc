#pragma once

// Single-header nlohmann/json from the vendor tree; kept behind one include
// so warning pragmas live in one place.

#if defined(__GNUC__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
#include <json.hpp>
#if defined(__GNUC__)
#pragma GCC diagnostic pop
#endif
