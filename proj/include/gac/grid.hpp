#ifndef GAC_GRID_HPP
#define GAC_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gac/errors.hpp"

namespace gac {

/// Upper grids cover Q_R^+ = [-R,R] x [0,R^2]; full grids cover
/// Q_R = [-R,R] x [-R^2,R^2].
enum class DomainKind { upper, full };

inline const char* to_string(DomainKind k) { return k == DomainKind::upper ? "upper" : "full"; }

/// Uniform anisotropic node grid. Node (i, j) sits at (x_i, y_j) and has the
/// linear index j * nx + i (y-major outer loop, x inner).
class Grid2D {
 public:
  Grid2D() = default;

  double R() const noexcept { return R_; }
  DomainKind kind() const noexcept { return kind_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  std::size_t size() const noexcept { return std::size_t(nx_) * std::size_t(ny_); }

  // Coordinates are computed from integers each time so that the same
  // (R, n, kind) always reproduces the same doubles, and full grids are
  // exactly symmetric: y_{ny-1-j} == -y_j.
  double x(int i) const noexcept { return R_ * double(2 * i - (nx_ - 1)) / double(nx_ - 1); }
  double y(int j) const noexcept {
    const double R2 = R_ * R_;
    if (kind_ == DomainKind::upper) return R2 * double(j) / double(ny_ - 1);
    return R2 * double(2 * j - (ny_ - 1)) / double(ny_ - 1);
  }
  double ymin() const noexcept { return y(0); }
  double ymax() const noexcept { return y(ny_ - 1); }

  std::size_t index(int i, int j) const noexcept {
    return std::size_t(j) * std::size_t(nx_) + std::size_t(i);
  }
  int col(std::size_t idx) const noexcept { return int(idx % std::size_t(nx_)); }
  int row(std::size_t idx) const noexcept { return int(idx / std::size_t(nx_)); }

  bool is_boundary(int i, int j) const noexcept {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }
  /// Column of the degenerate line x = 0.
  int center_col() const noexcept { return (nx_ - 1) / 2; }
  /// Row of y = 0 (full grids) or the bottom edge (upper grids).
  int zero_row() const noexcept { return kind_ == DomainKind::full ? (ny_ - 1) / 2 : 0; }

  /// Trapezoidal weight: 1 inside, 1/2 on edges, 1/4 at corners.
  double quadrature_weight(int i, int j) const noexcept {
    double w = 1.0;
    if (i == 0 || i == nx_ - 1) w *= 0.5;
    if (j == 0 || j == ny_ - 1) w *= 0.5;
    return w;
  }

  bool operator==(const Grid2D& o) const noexcept {
    return R_ == o.R_ && kind_ == o.kind_ && nx_ == o.nx_ && ny_ == o.ny_;
  }

  friend Grid2D make_grid(double R, int nx, int ny, DomainKind kind);

 private:
  double R_ = 1.0;
  DomainKind kind_ = DomainKind::upper;
  int nx_ = 3, ny_ = 3;
  double hx_ = 1.0, hy_ = 1.0;
};

inline Grid2D make_grid(double R, int nx, int ny, DomainKind kind) {
  require(std::isfinite(R) && R > 0.0, "make_grid: R must be positive");
  require(nx >= 3 && ny >= 3, "make_grid: need at least 3 nodes per direction");
  require(nx % 2 == 1, "make_grid: nx must be odd so that x = 0 is a grid line");
  require(ny % 2 == 1, "make_grid: ny must be odd");
  Grid2D g;
  g.R_ = R;
  g.kind_ = kind;
  g.nx_ = nx;
  g.ny_ = ny;
  g.hx_ = 2.0 * R / double(nx - 1);
  const double extent = kind == DomainKind::upper ? R * R : 2.0 * R * R;
  g.hy_ = extent / double(ny - 1);
  return g;
}

/// Scalar samples on a grid, stored in the grid's node order.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid2D& g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}
  Field(const Grid2D& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    require(v_.size() == g.size(), "Field: value count does not match grid");
  }

  template <class F>
  static Field sample(const Grid2D& g, F&& fn) {
    Field out(g);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) out(i, j) = fn(g.x(i), g.y(j));
    return out;
  }

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return v_.size(); }
  double& operator[](std::size_t k) noexcept { return v_[k]; }
  double operator[](std::size_t k) const noexcept { return v_[k]; }
  double& operator()(int i, int j) noexcept { return v_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return v_[grid_.index(i, j)]; }
  std::vector<double>& values() noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  bool all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid2D grid_;
  std::vector<double> v_;
};

inline double max_abs_difference(const Field& a, const Field& b) {
  require(a.grid() == b.grid(), "max_abs_difference: grids differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

struct GrushinBall {
  double x0 = 0.0;
  double y0 = 0.0;
  double radius = 1.0;
};

/// (x^4 + 4 y^2)^(1/4)
inline double grushin_norm(double x, double y) noexcept {
  const double x2 = x * x;
  return std::sqrt(std::sqrt(x2 * x2 + 4.0 * y * y));
}

inline bool in_ball(const GrushinBall& b, double x, double y) noexcept {
  // compare fourth powers so that nodes exactly on the sphere are excluded
  const double dx = x - b.x0, dy = y - b.y0;
  const double dx2 = dx * dx;
  const double r2 = b.radius * b.radius;
  return dx2 * dx2 + 4.0 * dy * dy < r2 * r2;
}

/// Ascending indices of every node strictly inside the ball.
inline std::vector<std::size_t> ball_mask(const Grid2D& g, const GrushinBall& b) {
  require(b.radius > 0.0, "ball_mask: radius must be positive");
  std::vector<std::size_t> out;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (in_ball(b, g.x(i), g.y(j))) out.push_back(g.index(i, j));
  return out;
}

/// Ball mask with grid-boundary nodes dropped (usable as a Dirichlet mask).
inline std::vector<std::size_t> interior_ball_mask(const Grid2D& g, const GrushinBall& b) {
  std::vector<std::size_t> out;
  for (std::size_t k : ball_mask(g, b))
    if (!g.is_boundary(g.col(k), g.row(k))) out.push_back(k);
  return out;
}

inline std::vector<std::size_t> interior_mask(const Grid2D& g) {
  std::vector<std::size_t> out;
  out.reserve(g.size());
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) out.push_back(g.index(i, j));
  return out;
}

/// Full grid whose upper half coincides node-for-node with `upper`.
inline Grid2D full_grid_of(const Grid2D& upper) {
  require(upper.kind() == DomainKind::upper, "full_grid_of: expected an upper grid");
  return make_grid(upper.R(), upper.nx(), 2 * upper.ny() - 1, DomainKind::full);
}

/// Odd extension in y: v(x,y) = u(x,y) for y >= 0, v(x,y) = -u(x,-y) for y < 0.
inline Field reflect_odd(const Field& u, double trace_tol = 1e-10) {
  const Grid2D& g = u.grid();
  require(g.kind() == DomainKind::upper, "reflect_odd: input must live on an upper grid");
  for (int i = 0; i < g.nx(); ++i)
    require(std::abs(u(i, 0)) <= trace_tol, "reflect_odd: u(x, 0) must vanish (zero bottom trace)");
  const Grid2D fg = full_grid_of(g);
  Field v(fg);
  const int mid = fg.zero_row();
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      v(i, mid + j) = u(i, j);
      v(i, mid - j) = -u(i, j);
    }
  for (int i = 0; i < g.nx(); ++i) v(i, mid) = 0.0;
  return v;
}

/// Restriction of a full-grid field to y >= 0.
inline Field restrict_upper(const Field& v) {
  const Grid2D& fg = v.grid();
  require(fg.kind() == DomainKind::full, "restrict_upper: input must live on a full grid");
  const Grid2D g = make_grid(fg.R(), fg.nx(), (fg.ny() + 1) / 2, DomainKind::upper);
  Field u(g);
  const int mid = fg.zero_row();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) u(i, j) = v(i, mid + j);
  return u;
}

/// Sub-rectangle of node indices [i0, i1] x [j0, j1], inclusive.
struct NodeWindow {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  int nx() const noexcept { return i1 - i0 + 1; }
  int ny() const noexcept { return j1 - j0 + 1; }
};

/// Nodes of `g` with |x| <= half_x and |y| <= half_y (full grids) or
/// 0 <= y <= half_y (upper grids).
inline NodeWindow centered_window(const Grid2D& g, double half_x, double half_y) {
  NodeWindow w{g.nx(), -1, g.ny(), -1};
  const double eps = 1e-9;
  for (int i = 0; i < g.nx(); ++i)
    if (std::abs(g.x(i)) <= half_x * (1 + eps)) {
      w.i0 = std::min(w.i0, i);
      w.i1 = std::max(w.i1, i);
    }
  for (int j = 0; j < g.ny(); ++j) {
    const double y = g.y(j);
    const bool inside = g.kind() == DomainKind::full ? std::abs(y) <= half_y * (1 + eps)
                                                     : (y >= 0.0 && y <= half_y * (1 + eps));
    if (inside) {
      w.j0 = std::min(w.j0, j);
      w.j1 = std::max(w.j1, j);
    }
  }
  require(w.i1 >= w.i0 && w.j1 >= w.j0, "centered_window: empty window");
  return w;
}

/// Copy of `u` restricted to a window, on the grid Q_r of matching spacing.
/// The window must be the centered box |x| <= r, |y| <= r^2 (or 0 <= y <= r^2).
inline Field restrict_to_box(const Field& u, double r) {
  const Grid2D& g = u.grid();
  const NodeWindow w = centered_window(g, r, r * r);
  const Grid2D sub = make_grid(r, w.nx(), w.ny(), g.kind());
  require(std::abs(sub.hx() - g.hx()) <= 1e-12 * g.hx() && std::abs(sub.hy() - g.hy()) <= 1e-12 * g.hy(),
          "restrict_to_box: r is not aligned with the grid");
  Field out(sub);
  for (int j = 0; j < w.ny(); ++j)
    for (int i = 0; i < w.nx(); ++i) out(i, j) = u(w.i0 + i, w.j0 + j);
  return out;
}

// --- CSV ------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header `x,y,value`, one node per row in node order.
inline void write_field_csv(std::ostream& os, const Field& u) {
  const Grid2D& g = u.grid();
  os << "x,y,value\n";
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      os << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ',' << format_double(u(i, j))
         << '\n';
}

/// Inverse of write_field_csv. The grid is reconstructed from the node
/// coordinates and checked against make_grid.
inline Field read_field_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "read_field_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "x,y,value", "read_field_csv: expected header 'x,y,value'");
  std::vector<double> xs, ys, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    require(std::getline(ss, a, ',') && std::getline(ss, b, ',') && std::getline(ss, c),
            "read_field_csv: malformed row '" + line + "'");
    xs.push_back(std::stod(a));
    ys.push_back(std::stod(b));
    vs.push_back(std::stod(c));
  }
  require(!xs.empty(), "read_field_csv: no rows");
  int nx = 0;
  while (nx < int(ys.size()) && ys[nx] == ys[0]) ++nx;
  require(nx >= 3 && xs.size() % std::size_t(nx) == 0, "read_field_csv: rows do not form a grid");
  const int ny = int(xs.size() / std::size_t(nx));
  const double R = xs[std::size_t(nx - 1)];
  const DomainKind kind = ys[0] < 0.0 ? DomainKind::full : DomainKind::upper;
  const Grid2D g = make_grid(R, nx, ny, kind);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      require(std::abs(xs[k] - g.x(i)) <= 1e-12 * R && std::abs(ys[k] - g.y(j)) <= 1e-12 * R * R,
              "read_field_csv: node coordinates do not match a uniform grid");
    }
  return Field(g, std::move(vs));
}

}  // namespace gac

#endif  // GAC_GRID_HPP
