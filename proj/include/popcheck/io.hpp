#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "popcheck/dataset.hpp"

namespace popcheck {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// One token per line, "doc_id<TAB>word_id". Blank lines and lines starting
/// with '#' are skipped. Group ids are the document ids.
Corpus read_corpus_tsv(const std::filesystem::path& path);

/// Header "x_1,...,x_p,y" followed by numeric rows.
RegressionData read_regression_csv(const std::filesystem::path& path);

/// Comma-separated output with LF line endings. Fields are written verbatim.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Writes `text` to `path` in binary mode, replacing any existing file.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace popcheck
