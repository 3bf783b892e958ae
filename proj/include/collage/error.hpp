#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collage {

enum class Errc {
  invalid_input,
  empty_extraction,
  degenerate_mask,
  degenerate_scale,
  invalid_placement,
  contract_violation,
  configuration,
  io,
  ingestion,
  preparation,
  evaluation,
};

std::string_view to_string(Errc code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace collage
