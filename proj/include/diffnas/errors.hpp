// Copyright 2026 The diffnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace diffnas {

// Root of every error thrown by the library. Callers that only need to
// report failures can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DIFFNAS_DEFINE_ERROR(Name)                 \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& what)         \
        : Error(std::string(#Name ": ") + what) {} \
  }

DIFFNAS_DEFINE_ERROR(InvalidSpec);
DIFFNAS_DEFINE_ERROR(SpaceTooLarge);
DIFFNAS_DEFINE_ERROR(InvalidK);
DIFFNAS_DEFINE_ERROR(SpecMismatch);
DIFFNAS_DEFINE_ERROR(StaleDiff);
DIFFNAS_DEFINE_ERROR(ParseError);
DIFFNAS_DEFINE_ERROR(InvalidKey);
DIFFNAS_DEFINE_ERROR(DuplicateKey);
DIFFNAS_DEFINE_ERROR(InsufficientGroups);
DIFFNAS_DEFINE_ERROR(EmptyDataset);
DIFFNAS_DEFINE_ERROR(DimensionMismatch);
DIFFNAS_DEFINE_ERROR(LengthMismatch);
DIFFNAS_DEFINE_ERROR(UndefinedCorrelation);
DIFFNAS_DEFINE_ERROR(InvalidArgument);
DIFFNAS_DEFINE_ERROR(ConfigError);
DIFFNAS_DEFINE_ERROR(MissingArtifact);
DIFFNAS_DEFINE_ERROR(IoError);

#undef DIFFNAS_DEFINE_ERROR

}  // namespace diffnas
