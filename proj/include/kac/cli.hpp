// Copyright 2026 The kac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace kac {

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the kac binary: audit, mine, select, evaluate,
// benchmark and release subcommands.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writes content to a temporary sibling and renames it over path, so path
// is either complete or untouched.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace kac
