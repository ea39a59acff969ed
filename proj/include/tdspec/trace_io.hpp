// Copyright 2026 The tdspec Authors
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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tdspec/cascaded.hpp"
#include "tdspec/correlation.hpp"

namespace tdspec {

/// Ordered "# key: value" header lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// git describe of the build.
std::string build_id();

/// Shortest round-tripping text for a double (%.17g).
std::string format_double(double x);
double parse_double(const std::string& s);

/// Value for `key`, or throws FormatError.
const std::string& lookup(const Metadata& meta, const std::string& key);

struct TraceFile {
  SpectrumTrace trace;
  Metadata meta;
};

/// Tab-separated table with '#' metadata headers. readout_time and
/// normalization are always written first.
void write_trace(std::ostream& os, const SpectrumTrace& trace, const Metadata& extra = {});
TraceFile read_trace(std::istream& is);

struct ExcitationFile {
  ExcitationRecord record;
  Metadata meta;
};

void write_excitation(std::ostream& os, const ExcitationRecord& rec, const Metadata& extra = {});
ExcitationFile read_excitation(std::istream& is);

/// One line per entry: t1, t2, re, im.
void write_grid(std::ostream& os, const CorrelationGrid& grid, const Metadata& extra = {});
CorrelationGrid read_grid(std::istream& is);

void write_manifest(std::ostream& os, const Metadata& meta);

/// Writes through a temporary file in the same directory.
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// "spectrum_<route>_t<t>.tsv" with t printed compactly (e.g. t16, t0.5).
std::string spectrum_filename(const std::string& route, double t);

}  // namespace tdspec
