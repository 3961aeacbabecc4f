#pragma once

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddsim/config.hpp"
#include "ddsim/decay.hpp"
#include "ddsim/errors.hpp"
#include "ddsim/experiments.hpp"
#include "ddsim/stochastic.hpp"

namespace ddsim {

namespace detail {

inline std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

// RFC-4180-style writer: one header row, `#`-prefixed comment lines for the
// manifest echo, numbers at 12 significant digits, deterministic row order.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& os) : os_(&os) {}

  explicit CsvWriter(const std::string& path) : path_(path) {
    file_.open(path, std::ios::out | std::ios::trunc);
    if (!file_) throw io_error("cannot open `" + path + "` for writing: " + std::strerror(errno));
    os_ = &file_;
  }

  void comment(const std::string& line) { *os_ << "# " << line << "\n"; }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      *os_ << (i ? "," : "") << cols[i];
    *os_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      *os_ << (i ? "," : "") << detail::fmt12(vals[i]);
    *os_ << "\n";
  }

  void close() {
    os_->flush();
    if (file_.is_open()) {
      file_.close();
      if (file_.fail())
        throw io_error("write to `" + path_ + "` failed: " + std::strerror(errno));
    }
  }

private:
  std::ostream* os_ = nullptr;
  std::ofstream file_;
  std::string path_;
};

inline void emit_decay_csv(CsvWriter& w, const DecayCurve& curve) {
  w.header({"t", "chi", "survival"});
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    w.row({curve.times[i], curve.chi[i], curve.survival[i]});
}

inline void emit_mc_csv(CsvWriter& w, const McResult& mc) {
  w.comment("seed = " + std::to_string(mc.seed));
  w.header({"t", "survival", "stderr", "trials"});
  for (std::size_t i = 0; i < mc.times.size(); ++i)
    w.row({mc.times[i], mc.survival[i], mc.stderrs[i], static_cast<double>(mc.trials)});
}

inline void emit_sweep_csv(CsvWriter& w, const std::vector<SweepResult>& sweeps) {
  bool first = true;
  for (const auto& s : sweeps) {
    w.comment("series: " + s.series);
    if (s.minimum)
      w.comment("quadratic_minimum: location=" + detail::fmt12(s.minimum->location) +
                " value=" + detail::fmt12(s.minimum->value) +
                " max_residual=" + detail::fmt12(s.minimum->max_residual));
    if (first) {
      w.header({s.parameter, s.metric, "max_residual"});
      first = false;
    }
    for (std::size_t i = 0; i < s.values.size(); ++i)
      w.row({s.values[i], s.results[i],
             i < s.max_residuals.size() ? s.max_residuals[i] : 0.0});
  }
}

// Two-column numeric CSV (omega, S); `#` comments and one optional header row
// are skipped.
inline void read_two_column_csv(const std::string& path, std::vector<double>& col_a,
                                std::vector<double>& col_b) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open `" + path + "`: " + std::strerror(errno));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      col_a.push_back(a);
      col_b.push_back(b);
    } else if (!detail::trim(line).empty() && col_a.empty() && line_no <= 2) {
      continue;  // header row
    } else if (!detail::trim(line).empty()) {
      throw io_error("`" + path + "` line " + std::to_string(line_no) +
                     ": expected two numeric columns");
    }
  }
  if (col_a.size() < 3)
    throw io_error("`" + path + "`: need at least 3 rows of (omega, S)");
}

}  // namespace ddsim
