// Copyright 2026 The braggio authors
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
// RFC 4180 CSV emission: comma-separated, CRLF rows, quoting only where
// needed, numbers rendered locale-independently with 17 significant digits.

#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "braggio/errors.hpp"
#include "braggio/optimize.hpp"

namespace braggio {

// NaN marks a result a failed point never produced; it serializes as an
// empty cell.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header)
      : columns_(header.size()) {
    append_row(header);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
      throw InvalidArgument("csv row width does not match the header");
    append_row(fields);
  }

  const std::string& text() const { return text_; }

 private:
  void append_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += csv_escape(fields[i]);
    }
    text_ += "\r\n";
  }

  std::size_t columns_;
  std::string text_;
};

inline const std::vector<std::string>& sweep_csv_header() {
  static const std::vector<std::string> header = {
      "omega0",     "tau_bs",  "dp",         "n_atoms",    "mu_opt",
      "xi_opt",     "dphi",    "gain_sqrtN", "gain_db",    "survival_1",
      "survival_2", "slope",   "error"};
  return header;
}

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  CsvWriter w(sweep_csv_header());
  for (const SweepRecord& r : records) {
    const bool failed = !r.error.empty();
    const auto result = [&](double v) {
      return failed ? std::string{} : csv_number(v);
    };
    w.row({csv_number(r.omega0), result(r.tau_bs), csv_number(r.dp),
           std::to_string(r.n_atoms), result(r.mu_opt), result(r.xi_opt),
           result(r.dphi), result(r.gain_sqrt_n), result(r.gain_db),
           result(r.survival_1), result(r.survival_2), result(r.slope),
           r.error});
  }
  return w.text();
}

}  // namespace braggio
