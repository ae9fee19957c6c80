#pragma once

// Plain-text lattice snapshots:
//
//   gen=<n> w=<w> h=<h> L=<value>
//   <h rows of w characters from {C, D, A}>

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pdsim/error.hpp"
#include "pdsim/grid.hpp"

namespace pdsim {

// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct Snapshot {
  std::size_t generation = 0;
  double L = 0.0;
  Grid grid;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

inline void write_snapshot(std::ostream& os, const Snapshot& s) {
  os << "gen=" << s.generation << " w=" << s.grid.width() << " h=" << s.grid.height()
     << " L=" << format_number(s.L) << '\n';
  for (std::size_t y = 0; y < s.grid.height(); ++y) os << s.grid.row_string(y) << '\n';
}

inline std::string snapshot_text(const Snapshot& s) {
  std::ostringstream os;
  write_snapshot(os, s);
  return os.str();
}

namespace detail {

template <class T>
T parse_field(std::string_view token, std::string_view key, std::size_t line) {
  if (token.substr(0, key.size()) != key || token.size() == key.size() || token[key.size()] != '=')
    throw FormatError(line, "expected " + std::string(key) + "=<value>");
  const std::string_view value = token.substr(key.size() + 1);
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw FormatError(line, "bad value for " + std::string(key));
  return out;
}

}  // namespace detail

inline Snapshot read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError(1, "missing header");
  std::vector<std::string_view> tokens;
  {
    std::string_view rest = header;
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(' ');
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto stop = rest.find(' ');
      tokens.push_back(rest.substr(0, stop));
      rest.remove_prefix(stop == std::string_view::npos ? rest.size() : stop);
    }
  }
  if (tokens.size() != 4) throw FormatError(1, "header needs gen=, w=, h= and L= fields");
  Snapshot s;
  s.generation = detail::parse_field<std::size_t>(tokens[0], "gen", 1);
  const auto w = detail::parse_field<std::size_t>(tokens[1], "w", 1);
  const auto h = detail::parse_field<std::size_t>(tokens[2], "h", 1);
  s.L = detail::parse_field<double>(tokens[3], "L", 1);
  if (w == 0 || h == 0) throw FormatError(1, "grid dimensions must be positive");

  s.grid = Grid(w, h);
  std::string row;
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t line = y + 2;
    if (!std::getline(is, row)) throw FormatError(line, "expected " + std::to_string(h) + " rows");
    if (row.size() != w)
      throw FormatError(line, "row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(w));
    for (std::size_t x = 0; x < w; ++x) {
      auto st = strategy_from_char(row[x]);
      if (!st) throw FormatError(line, std::string("bad strategy character '") + row[x] + "'");
      s.grid.set(x, y, *st);
    }
  }
  if (std::getline(is, row) && !row.empty()) throw FormatError(h + 2, "trailing content after grid");
  return s;
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open");
  return read_snapshot(in);
}

}  // namespace pdsim
