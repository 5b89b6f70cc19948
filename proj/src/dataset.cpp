#include "ueb/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ueb {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

double parse_real(const std::string& field, std::size_t row, const std::string& col,
                  const std::string& origin) {
  const std::string t = trimmed(field);
  double v = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw DataError(origin + ": row " + std::to_string(row) + ": column '" + col +
                    "' is not a number: '" + t + "'");
  return v;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text, Family f, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  auto header = split_csv_line(trimmed(line));
  for (auto& h : header) h = trimmed(h);
  if (header.size() < 4 || header[0] != "area_id" || header[1] != "y" || header[2] != "n")
    throw DataError(origin + ": header must be area_id,y,n,<x1>,... with at least one "
                             "covariate column (use a ones column for an intercept)");

  Dataset ds;
  ds.x_names.assign(header.begin() + 3, header.end());
  const std::size_t q = ds.q();

  std::unordered_set<std::string> seen;
  std::size_t row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    const auto fields = split_csv_line(t);
    if (fields.size() != header.size())
      throw DataError(origin + ": row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    const std::string id = trimmed(fields[0]);
    if (id.empty())
      throw DataError(origin + ": row " + std::to_string(row) + ": empty area_id");
    if (!seen.insert(id).second)
      throw DataError(origin + ": row " + std::to_string(row) + ": duplicate area_id '" + id +
                      "'");
    AreaRecord rec;
    rec.y = parse_real(fields[1], row, "y", origin);
    rec.n = parse_real(fields[2], row, "n", origin);
    rec.x.resize(q);
    for (std::size_t j = 0; j < q; ++j)
      rec.x[j] = parse_real(fields[3 + j], row, ds.x_names[j], origin);
    try {
      validate_record(rec, f, q);
    } catch (const std::invalid_argument& e) {
      throw DataError(origin + ": row " + std::to_string(row) + ": " + e.what());
    }
    ds.ids.push_back(id);
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw DataError(origin + ": no data rows");
  return ds;
}

Dataset load_dataset_csv(const std::string& path, Family f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str(), f, path);
}

}  // namespace ueb
