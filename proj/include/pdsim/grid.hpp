#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdsim/census.hpp"
#include "pdsim/error.hpp"
#include "pdsim/game.hpp"

namespace pdsim {

// Fully populated toroidal lattice, row-major.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, Strategy fill = Strategy::Abstain)
      : width_(width), height_(height), cells_(width * height, fill) {
    if (width == 0 || height == 0) throw Error("grid dimensions must be positive");
  }

  // Rows of 'C'/'D'/'A' characters, top row first.
  static Grid from_rows(std::span<const std::string_view> rows) {
    if (rows.empty() || rows.front().empty()) throw Error("grid rows must be non-empty");
    Grid g(rows.front().size(), rows.size());
    for (std::size_t y = 0; y < rows.size(); ++y) {
      if (rows[y].size() != g.width_) throw Error("ragged grid rows");
      for (std::size_t x = 0; x < g.width_; ++x) {
        auto s = strategy_from_char(rows[y][x]);
        if (!s) throw Error(std::string("bad strategy character '") + rows[y][x] + "'");
        g.set(x, y, *s);
      }
    }
    return g;
  }
  static Grid from_rows(std::initializer_list<std::string_view> rows) {
    return from_rows(std::span<const std::string_view>(rows.begin(), rows.size()));
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  std::size_t index(std::size_t x, std::size_t y) const noexcept { return y * width_ + x; }
  Strategy at(std::size_t x, std::size_t y) const noexcept { return cells_[index(x, y)]; }
  void set(std::size_t x, std::size_t y, Strategy s) noexcept { cells_[index(x, y)] = s; }

  // Wrapped coordinate access; offsets may be negative.
  std::size_t wrap_x(std::ptrdiff_t x) const noexcept { return wrap(x, width_); }
  std::size_t wrap_y(std::ptrdiff_t y) const noexcept { return wrap(y, height_); }
  Strategy at_wrapped(std::ptrdiff_t x, std::ptrdiff_t y) const noexcept { return at(wrap_x(x), wrap_y(y)); }

  std::span<const Strategy> cells() const noexcept { return cells_; }
  std::span<Strategy> cells() noexcept { return cells_; }

  StrategyCensus census() const noexcept { return census_of(cells_); }
  std::uint64_t hash() const noexcept { return state_hash(cells_); }

  // Cell (x, y) of the result holds cell (x - dx, y - dy) of this grid.
  Grid translated(std::ptrdiff_t dx, std::ptrdiff_t dy) const {
    Grid out(width_, height_);
    for (std::size_t y = 0; y < height_; ++y)
      for (std::size_t x = 0; x < width_; ++x)
        out.set(wrap_x(static_cast<std::ptrdiff_t>(x) + dx), wrap_y(static_cast<std::ptrdiff_t>(y) + dy), at(x, y));
    return out;
  }

  std::string row_string(std::size_t y) const {
    std::string row(width_, ' ');
    for (std::size_t x = 0; x < width_; ++x) row[x] = to_char(at(x, y));
    return row;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t wrap(std::ptrdiff_t v, std::size_t n) noexcept {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((v % m) + m) % m);
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Strategy> cells_;
};

}  // namespace pdsim
