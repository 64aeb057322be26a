#pragma once

#include <filesystem>
#include <string>

#include "sllm/model.hpp"
#include "sllm/text.hpp"

namespace sllm {

// Comma-separated embedding table: user_id,e0..e{d-1}. Values are written
// with 17 significant digits so a reload reproduces the doubles exactly.
inline void export_embeddings(const EmbeddingMatrix& em, const std::filesystem::path& path) {
  std::string out = "user_id";
  for (std::size_t j = 0; j < em.values.cols(); ++j) out += ",e" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < em.user_ids.size(); ++i) {
    out += em.user_ids[i];
    for (double v : em.values.row(i)) out += "," + fmt_g17(v);
    out += "\n";
  }
  write_file_atomic(path, out);
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = split(text, '\n');
  if (lines.empty() || strip(lines[0]).empty())
    throw FormatError(path.string() + ":1: missing header row");
  const auto header = split(strip(lines[0]), ',');
  if (header.empty() || header[0] != "user_id")
    throw FormatError(path.string() + ":1: header must start with user_id");
  const std::size_t d = header.size() - 1;

  EmbeddingMatrix em;
  std::vector<Vec> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = strip(lines[i]);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != d + 1)
      throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": row has " +
                        std::to_string(cells.size()) + " columns, expected " +
                        std::to_string(d + 1));
    em.user_ids.push_back(cells[0]);
    Vec row(d);
    for (std::size_t j = 0; j < d; ++j)
      if (!parse_double(cells[j + 1], row[j]))
        throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": bad value '" +
                          cells[j + 1] + "'");
    rows.push_back(std::move(row));
  }
  em.values = Matrix(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), em.values.row(i).begin());
  return em;
}

}  // namespace sllm
