#pragma once

// Shared helpers for the test binaries. MINARET_DATA_DIR points at the
// repository's data/ directory and is injected by the build.

#include <string>

#ifndef MINARET_DATA_DIR
#define MINARET_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& rel) {
  return std::string(MINARET_DATA_DIR) + "/" + rel;
}
