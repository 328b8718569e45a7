#pragma once

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "salttrack/error.hpp"

namespace testing {

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("salttrack_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

template <typename F>
salttrack::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const salttrack::Error& e) {
    return e.kind();
  }
  FAIL("expected salttrack::Error");
  return salttrack::ErrorKind::usage;
}

}  // namespace testing
