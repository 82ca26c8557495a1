// errors.h
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
//
// Exception hierarchy shared by every module. The CLI maps these onto exit
// codes: InputError -> 2, IncomparableError -> 3, anything else -> 1.

#ifndef EMBSTAB_ERRORS_H_
#define EMBSTAB_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace embstab {

// Bad user input: malformed corpus, missing file, invalid configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Two embedding spaces trained over different vocabularies.
class IncomparableError : public std::runtime_error {
 public:
  IncomparableError() : std::runtime_error("incomparable spaces") {}
  explicit IncomparableError(const std::string& what)
      : std::runtime_error("incomparable spaces: " + what) {}
};

// Zero-variance input to a correlation.
class DegenerateSeriesError : public std::domain_error {
 public:
  DegenerateSeriesError() : std::domain_error("degenerate series") {}
};

}  // namespace embstab

#endif  // EMBSTAB_ERRORS_H_
