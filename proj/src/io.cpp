#include "popcheck/io.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace popcheck {

namespace {

std::runtime_error io_error(const std::filesystem::path& path, const std::string& what) {
  return std::runtime_error(path.string() + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open for reading");
  return in;
}

template <class T>
T parse_number(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw io_error(path, "line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

Corpus read_corpus_tsv(const std::filesystem::path& path) {
  auto in = open_input(path);
  Corpus out;
  std::vector<GroupLabel> groups;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw io_error(path, "line " + std::to_string(lineno) + ": expected doc_id<TAB>word_id");
    const auto doc = parse_number<std::int32_t>(fields[0], path, lineno);
    const auto word = parse_number<std::int32_t>(fields[1], path, lineno);
    if (doc < 0 || word < 0) throw io_error(path, "line " + std::to_string(lineno) + ": ids must be nonnegative");
    out.observations.push_back({doc, word});
    groups.push_back(doc);
  }
  if (in.bad()) throw io_error(path, "read error");
  out.group_ids = std::move(groups);
  return out;
}

RegressionData read_regression_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "y") throw io_error(path, "header must be x_1,...,x_p,y");
  for (std::size_t j = 0; j + 1 < header.size(); ++j) {
    if (header[j] != "x_" + std::to_string(j + 1)) throw io_error(path, "header column " + std::to_string(j + 1) + " must be x_" + std::to_string(j + 1));
  }
  const std::size_t p = header.size() - 1;
  RegressionData out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != p + 1) throw io_error(path, "line " + std::to_string(lineno) + ": expected " + std::to_string(p + 1) + " fields");
    RegressionPoint pt;
    pt.covariates.reserve(p);
    for (std::size_t j = 0; j < p; ++j) pt.covariates.push_back(parse_number<double>(fields[j], path, lineno));
    pt.response = parse_number<double>(fields[p], path, lineno);
    out.observations.push_back(std::move(pt));
  }
  if (in.bad()) throw io_error(path, "read error");
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw io_error(path, "cannot open for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw io_error(path_, "write failed");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw io_error(path_, "close failed");
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path, "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (out.fail()) throw io_error(path, "write failed");
}

}  // namespace popcheck
