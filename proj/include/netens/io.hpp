#ifndef NETENS_IO_HPP
#define NETENS_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netens/graph.hpp"

namespace netens {

// Edge file: header "source,target,volume", one directed flow per row.
std::vector<DirectedEdge> read_edge_csv(const std::string& path);

// GDP file: header "country,gdp". Label matching elsewhere is exact.
std::vector<std::pair<std::string, double>> read_gdp_csv(const std::string& path);

// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);

std::vector<std::string> split_csv_row(const std::string& line);

}  // namespace netens

#endif
