// format.h
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
// Number formatting shared by every text artifact.

#ifndef EMBSTAB_FORMAT_H_
#define EMBSTAB_FORMAT_H_

#include <string>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace embstab {

// Shortest fixed-notation text that parses back to the same double
// ("0.0001", "0.75", "7").
std::string format_number(double value);

// Shortest round-trip text in whichever notation is shorter; used for vector
// components so files reload bit-exactly.
std::string format_exact(double value);

// Parses a full double; throws InputError naming `what` on failure.
double parse_double(const std::string& text, const std::string& what);

// RFC 4180 quoting, applied only when the field needs it.
std::string csv_field(std::string_view field);

// Reads a whole CSV document (quoted fields may contain commas, quotes and
// newlines). Throws InputError on an unterminated quote.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace embstab

#endif  // EMBSTAB_FORMAT_H_
