#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "slowflow/snapshot.hpp"  // IoError

namespace slowflow {

// Shortest round-trippable decimal form of a double (%.17g), locale-free.
std::string fmt_double(double v);

// Minimal CSV emitter: fixed header, one row per call, %.17g numbers.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);

private:
  std::ofstream os_;
  std::string path_;
  std::size_t columns_;
};

// Appends one compact JSON object per line.
class NdjsonWriter {
public:
  explicit NdjsonWriter(const std::string& path);
  void line(const std::string& json_object);

private:
  std::ofstream os_;
  std::string path_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace slowflow
