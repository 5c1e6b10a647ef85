#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asmplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (nested lists, JSON payloads, VLM responses).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position = npos)
      : Error(position == npos ? what : what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A graph (or other structure) violates an invariant required by an operation.
class InvalidGraph : public Error {
 public:
  using Error::Error;
};

/// Bad argument values: empty inputs, mismatched part sets, unknown ids.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A permutation search would exceed the configured cap.
class PermutationCapExceeded : public Error {
 public:
  PermutationCapExceeded(std::size_t required, std::size_t cap)
      : Error("permutation count " + std::to_string(required) + " exceeds cap " + std::to_string(cap)),
        required_(required),
        cap_(cap) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t required_;
  std::size_t cap_;
};

/// A sampler could not produce a result under its constraints.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (files, env vars, endpoint settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace asmplan
