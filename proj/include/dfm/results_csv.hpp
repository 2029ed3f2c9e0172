#pragma once

#include "dfm/core.hpp"
#include "dfm/datasets.hpp"

#include <array>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dfm {

/// One CSV line: a single repetition (rep = "0", "1", ...) or an aggregate
/// over repetitions (rep = "mean" or "sd").
struct ResultRow {
  std::string experiment;
  std::string distribution;
  long long n = 0;
  int k = 0;
  int k0 = 0;
  double rho = 0.0;
  double sigma2a = 0.0;
  long long m = 0;
  double sigma2w = 0.0;
  unsigned long long seed = 0;
  std::string rep;
  double hamming = 0.0;
  double hamming_raw_l0 = 0.0;
  double fhat = 0.0;
  double spectral_deviation = 0.0;
  double delta = 0.0;
  double elapsed_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::array<std::string_view, 17> kResultColumns = {
    "experiment", "distribution", "n",       "K",       "K0",
    "rho",        "sigma2A",      "m",       "sigma2W", "seed",
    "rep",        "hamming",      "hamming_raw_l0",     "fhat",
    "spectral_deviation",         "delta",   "elapsed_ms"};

inline std::string format_results_csv(const std::vector<ResultRow>& rows) {
  std::string out;
  for (std::size_t c = 0; c < kResultColumns.size(); ++c) {
    if (c) out += ',';
    out += kResultColumns[c];
  }
  out += '\n';
  for (const auto& r : rows) {
    out += r.experiment + ',' + r.distribution + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + std::to_string(r.k0) + ',' + format_double(r.rho) +
           ',' + format_double(r.sigma2a) + ',' + std::to_string(r.m) + ',' +
           format_double(r.sigma2w) + ',' + std::to_string(r.seed) + ',' + r.rep + ',' +
           format_double(r.hamming) + ',' + format_double(r.hamming_raw_l0) + ',' +
           format_double(r.fhat) + ',' + format_double(r.spectral_deviation) + ',' +
           format_double(r.delta) + ',' + format_double(r.elapsed_ms) + '\n';
  }
  return out;
}

inline void write_results_csv(const std::vector<ResultRow>& rows,
                              const std::filesystem::path& path) {
  write_text_file(path, format_results_csv(rows));
}

inline std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("results CSV is empty");
  {
    std::string expected;
    for (std::size_t c = 0; c < kResultColumns.size(); ++c) {
      if (c) expected += ',';
      expected += kResultColumns[c];
    }
    if (line != expected) throw ParseError("results CSV header mismatch");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != kResultColumns.size()) {
      throw ParseError("results CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(kResultColumns.size()) + " fields");
    }
    ResultRow r;
    try {
      r.experiment = f[0];
      r.distribution = f[1];
      r.n = std::stoll(f[2]);
      r.k = std::stoi(f[3]);
      r.k0 = std::stoi(f[4]);
      r.rho = parse_double(f[5]);
      r.sigma2a = parse_double(f[6]);
      r.m = std::stoll(f[7]);
      r.sigma2w = parse_double(f[8]);
      r.seed = std::stoull(f[9]);
      r.rep = f[10];
      r.hamming = parse_double(f[11]);
      r.hamming_raw_l0 = parse_double(f[12]);
      r.fhat = parse_double(f[13]);
      r.spectral_deviation = parse_double(f[14]);
      r.delta = parse_double(f[15]);
      r.elapsed_ms = parse_double(f[16]);
    } catch (const std::logic_error&) {
      throw ParseError("results CSV line " + std::to_string(line_no) + ": bad field");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dfm
