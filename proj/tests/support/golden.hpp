#pragma once

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "privcore/csv.hpp"

namespace privcore::testing {

// Compares text against tests/golden/<name>. With PRIVCORE_UPDATE_GOLDEN set
// the file is rewritten instead.
inline void expect_golden(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = std::filesystem::path(PRIVCORE_GOLDEN_DIR) / name;
  if (std::getenv("PRIVCORE_UPDATE_GOLDEN") != nullptr) {
    write_text_file_atomic(path, actual);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << "missing golden file " << path
                                             << "; rerun with PRIVCORE_UPDATE_GOLDEN=1";
  EXPECT_EQ(actual, read_text_file(path)) << "golden mismatch for " << name;
}

}  // namespace privcore::testing
