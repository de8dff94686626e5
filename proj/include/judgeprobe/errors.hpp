// Copyright 2026 The judgeprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace judgeprobe {

// Base for every error the library raises. `error_class()` is the stable name
// written into machine-readable error records by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* error_class() const noexcept { return "Error"; }
};

#define JUDGEPROBE_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                              \
   public:                                                                 \
    using Error::Error;                                                    \
    const char* error_class() const noexcept override { return #Name; }    \
  }

JUDGEPROBE_DEFINE_ERROR(UsageError);
JUDGEPROBE_DEFINE_ERROR(ValidationError);
JUDGEPROBE_DEFINE_ERROR(NotFoundError);
JUDGEPROBE_DEFINE_ERROR(IntegrityError);
JUDGEPROBE_DEFINE_ERROR(ConflictError);
JUDGEPROBE_DEFINE_ERROR(AuthError);
JUDGEPROBE_DEFINE_ERROR(AssemblyError);
JUDGEPROBE_DEFINE_ERROR(StorageError);
JUDGEPROBE_DEFINE_ERROR(TransportError);
JUDGEPROBE_DEFINE_ERROR(VerdictParseError);

#undef JUDGEPROBE_DEFINE_ERROR

// Raised when a generator response cannot be parsed. Keeps the raw response so
// it can be triaged by hand.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const char* error_class() const noexcept override { return "ParseError"; }
  const std::string& raw_response() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace judgeprobe
