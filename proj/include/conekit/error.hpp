/* Copyright 2026 The conekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CONEKIT_ERROR_HPP
#define CONEKIT_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace conekit {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input syntax. `position` is a line (text formats) or byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> position = {})
      : Error(what), position_(position) {}
  std::optional<std::size_t> position() const { return position_; }

 private:
  std::optional<std::size_t> position_;
};

// Syntactically fine but semantically invalid content (e.g. boxes off-image).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Binary container errors (FSFV).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Requested conversion or feature is not supported.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace conekit

#endif  // CONEKIT_ERROR_HPP
