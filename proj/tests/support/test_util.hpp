#pragma once

#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <string>

#include "evicheck/error.hpp"

namespace evicheck::testing {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an evicheck::Error");
  return ErrorCode::kInvalidInput;
}

class TempDir {
 public:
  TempDir()
      : path_(std::filesystem::temp_directory_path() /
              ("evicheck_" + std::to_string(::getpid()) + "_" + std::to_string(++counter_))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace evicheck::testing
