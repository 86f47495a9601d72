// Copyright 2026 The FrameBERT Authors.
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

#ifndef FRAMEBERT_CLI_H_
#define FRAMEBERT_CLI_H_

#include <iosfwd>

namespace framebert {

// Runs one subcommand. Returns 0 on success, 1 on usage or validation
// errors and 2 on I/O errors; diagnostics go to `err`.
int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace framebert

#endif  // FRAMEBERT_CLI_H_
