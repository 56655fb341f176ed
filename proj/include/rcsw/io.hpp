// Copyright 2026 The RCSW Authors
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

#ifndef RCSW_IO_HPP
#define RCSW_IO_HPP

#include <string>
#include <vector>

namespace rcsw {

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF; quotes doubled.
std::string csv_field(const std::string &s);
std::string csv_line(const std::vector<std::string> &fields);

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite values).
std::string fmt_double(double v);

/// Writes through a sibling temporary file and renames it over `path`.
/// Creates parent directories. Throws Error on IO failure.
void write_atomic(const std::string &path, const std::string &content);

std::string read_file(const std::string &path);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

} // namespace rcsw

#endif
