#pragma once

#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <string>

#include "pzl/poolgen.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    static std::mutex mutex;
    int id;
    {
      std::lock_guard<std::mutex> lock(mutex);
      id = counter++;
    }
    path = fs::temp_directory_path() /
           ("pzl-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(id));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// Sample pools shared by all tests in one binary; synthesized once. Scene
// images use a small side so fixture setup stays fast.
inline const pzl::poolgen::SamplePoolPaths& shared_pools() {
  static TempDir dir("pools");
  static pzl::poolgen::SamplePoolPaths paths =
      pzl::poolgen::write_all(dir.path, /*seed=*/99, /*image_count=*/24, /*image_side=*/512);
  return paths;
}

}  // namespace testutil
