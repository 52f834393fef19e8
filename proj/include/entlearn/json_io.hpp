// Copyright 2026 The entlearn Authors
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

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"

namespace entlearn {

using Json = nlohmann::json;

/// Compact single-line JSON where every floating-point number is written with
/// 17 significant digits, so parsing recovers the exact double.
std::string dump_json(const Json& value);

/// Shortest-exact 17-significant-digit rendering of a double, shared by the
/// JSON and CSV writers. Throws ValidationError for non-finite input.
std::string format_double(double value);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Creates the parent directory of `path` if it does not exist.
void ensure_parent_directory(const std::filesystem::path& path);

}  // namespace entlearn
