#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace disenlink {

// All library failures carry a short machine-parsable category next to the
// human-readable message. The CLI prints "error: <category>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace disenlink
