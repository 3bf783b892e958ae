#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "collage/error.hpp"

namespace collage::testing {

// Error code thrown by fn, or nothing when it returns normally.
template <class Fn>
std::optional<Errc> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Relative path -> file bytes for every regular file under `root`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace collage::testing
