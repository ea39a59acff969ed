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

#include "tdspec/trace_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#ifndef TDSPEC_GIT_DESCRIBE
#define TDSPEC_GIT_DESCRIBE "unknown"
#endif

namespace tdspec {

namespace {

void write_header(std::ostream& os, const std::string& kind, const Metadata& fixed,
                  const Metadata& extra) {
  os << "# tdspec " << kind << '\n';
  os << "# build: " << build_id() << '\n';
  for (const auto& [k, v] : fixed) os << "# " << k << ": " << v << '\n';
  for (const auto& [k, v] : extra) os << "# " << k << ": " << v << '\n';
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) out.push_back(field);
  return out;
}

// Reads '#' headers, the column line and the numeric rows.
struct Table {
  Metadata meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& is, const std::vector<std::string>& expected_columns) {
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (first) {
        first = false;
        continue;  // "# tdspec <kind>"
      }
      const auto colon = line.find(": ");
      if (colon == std::string::npos || colon < 2) throw FormatError("malformed header line: " + line);
      t.meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split_tabs(line);
      if (t.columns != expected_columns) throw FormatError("unexpected column header: " + line);
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != expected_columns.size()) throw FormatError("wrong field count: " + line);
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw FormatError("missing column header");
  return t;
}

Metadata without(const Metadata& meta, std::initializer_list<const char*> keys) {
  Metadata out;
  for (const auto& kv : meta) {
    bool skip = kv.first == "build";
    for (const char* k : keys) skip = skip || kv.first == k;
    if (!skip) out.push_back(kv);
  }
  return out;
}

}  // namespace

std::string build_id() { return TDSPEC_GIT_DESCRIBE; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty()) throw FormatError("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("bad number '" + s + "'");
  return v;
}

const std::string& lookup(const Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  throw FormatError("missing header '" + key + "'");
}

void write_trace(std::ostream& os, const SpectrumTrace& trace, const Metadata& extra) {
  trace.validate();
  write_header(os, "spectrum",
               {{"readout_time", format_double(trace.readout_time)},
                {"normalization", to_string(trace.normalization)}},
               extra);
  os << "omega\tintensity\n";
  for (const auto& p : trace.points) os << format_double(p.omega) << '\t' << format_double(p.intensity) << '\n';
}

TraceFile read_trace(std::istream& is) {
  Table t = read_table(is, {"omega", "intensity"});
  TraceFile f;
  f.trace.readout_time = parse_double(lookup(t.meta, "readout_time"));
  f.trace.normalization = normalization_from_string(lookup(t.meta, "normalization"));
  for (const auto& r : t.rows) f.trace.points.push_back({r[0], r[1]});
  f.trace.validate();
  f.meta = without(t.meta, {"readout_time", "normalization"});
  return f;
}

void write_excitation(std::ostream& os, const ExcitationRecord& rec, const Metadata& extra) {
  rec.validate();
  write_header(os, "excitation", {{"omega_b", format_double(rec.omega_b)}}, extra);
  os << "time\tp_excited\tstderr\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    os << format_double(rec.times[i]) << '\t' << format_double(rec.p_excited[i]) << '\t'
       << format_double(rec.std_error[i]) << '\n';
  }
}

ExcitationFile read_excitation(std::istream& is) {
  Table t = read_table(is, {"time", "p_excited", "stderr"});
  ExcitationFile f;
  f.record.omega_b = parse_double(lookup(t.meta, "omega_b"));
  for (const auto& r : t.rows) {
    f.record.times.push_back(r[0]);
    f.record.p_excited.push_back(r[1]);
    f.record.std_error.push_back(r[2]);
  }
  f.record.validate();
  f.meta = without(t.meta, {"omega_b"});
  return f;
}

void write_grid(std::ostream& os, const CorrelationGrid& grid, const Metadata& extra) {
  write_header(os, "grid", {{"T", format_double(grid.T)}, {"N", std::to_string(grid.N)}}, extra);
  os << "t1\tt2\tre\tim\n";
  for (int m = 0; m <= grid.N; ++m) {
    for (int n = 0; n <= grid.N; ++n) {
      const cd v = grid.values(m, n);
      os << format_double(grid.time(m)) << '\t' << format_double(grid.time(n)) << '\t'
         << format_double(v.real()) << '\t' << format_double(v.imag()) << '\n';
    }
  }
}

CorrelationGrid read_grid(std::istream& is) {
  Table t = read_table(is, {"t1", "t2", "re", "im"});
  CorrelationGrid g;
  g.T = parse_double(lookup(t.meta, "T"));
  g.N = std::stoi(lookup(t.meta, "N"));
  const std::size_t side = static_cast<std::size_t>(g.N) + 1;
  if (t.rows.size() != side * side) throw FormatError("grid row count does not match N");
  g.values.resize(g.N + 1, g.N + 1);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    g.values(i / side, i % side) = cd(t.rows[i][2], t.rows[i][3]);
  }
  return g;
}

void write_manifest(std::ostream& os, const Metadata& meta) {
  os << "# tdspec manifest\n";
  os << "build: " << build_id() << '\n';
  for (const auto& [k, v] : meta) os << k << ": " << v << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string spectrum_filename(const std::string& route, double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", t);
  return "spectrum_" + route + "_t" + buf + ".tsv";
}

}  // namespace tdspec
