#pragma once

#include <stdexcept>
#include <string>

namespace iesc {

/// A kernel was asked to evaluate at R = 0.
class singularity_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An inward offset would cross the body's centre region.
class degenerate_offset_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Series truncation above the hard cap.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Operation refused because its input is in the wrong state.
class invalid_state_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration problem tied to a specific key.
class config_error : public std::runtime_error {
 public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace iesc
