#include "slowflow/io_util.hpp"

#include <cstdio>
#include <sstream>

namespace slowflow {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : os_(path), path_(path), columns_(header.size()) {
  if (!os_) throw IoError("CsvWriter: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    os_ << header[i] << (i + 1 < header.size() ? "," : "\n");
  if (!os_) throw IoError("CsvWriter: write failed for " + path);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw IoError("CsvWriter: column count mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    os_ << fmt_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
  if (!os_) throw IoError("CsvWriter: write failed for " + path_);
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != columns_)
    throw IoError("CsvWriter: column count mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    os_ << values[i] << (i + 1 < values.size() ? "," : "\n");
  if (!os_) throw IoError("CsvWriter: write failed for " + path_);
}

NdjsonWriter::NdjsonWriter(const std::string& path) : os_(path), path_(path) {
  if (!os_) throw IoError("NdjsonWriter: cannot open " + path);
}

void NdjsonWriter::line(const std::string& json_object) {
  os_ << json_object << "\n";
  if (!os_) throw IoError("NdjsonWriter: write failed for " + path_);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoError("write_text_file: cannot open " + path);
  os << content;
  if (!os) throw IoError("write_text_file: write failed for " + path);
}

}  // namespace slowflow
