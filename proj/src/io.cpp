#include "netens/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netens {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

namespace {

double parse_double(const std::string& s, const std::string& context) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty())
    throw std::invalid_argument("bad numeric field '" + s + "' in " + context);
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return in;
}

}  // namespace

std::vector<DirectedEdge> read_edge_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_row(line) !=
      std::vector<std::string>{"source", "target", "volume"})
    throw std::invalid_argument(path + ": expected header 'source,target,volume'");
  std::vector<DirectedEdge> edges;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 3)
      throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                  " has " + std::to_string(fields.size()) + " fields");
    edges.push_back({fields[0], fields[1],
                     parse_double(fields[2], path + " row " + std::to_string(row))});
  }
  return edges;
}

std::vector<std::pair<std::string, double>> read_gdp_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_row(line) != std::vector<std::string>{"country", "gdp"})
    throw std::invalid_argument(path + ": expected header 'country,gdp'");
  std::vector<std::pair<std::string, double>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 2)
      throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                  " has " + std::to_string(fields.size()) + " fields");
    rows.emplace_back(fields[0],
                      parse_double(fields[1], path + " row " + std::to_string(row)));
  }
  return rows;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

}  // namespace netens
