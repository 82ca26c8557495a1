// cli.h
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

#ifndef EMBSTAB_TOOLS_CLI_H_
#define EMBSTAB_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace embstab::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kIncomparable = 3,
};

// Default output directory when --output is omitted.
inline constexpr const char* kOutputDirEnv = "EMBSTAB_OUTPUT_DIR";

// Runs one command line (args[0] is the program name). Diagnostics go to
// `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& err);

}  // namespace embstab::cli

#endif  // EMBSTAB_TOOLS_CLI_H_
