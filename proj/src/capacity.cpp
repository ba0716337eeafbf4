#include "qcw/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_ring(double r, double R) {
  if (!(r > 0.0) || !(R > r)) throw InvalidRing("ring needs 0 < r < R");
}

}  // namespace

std::string to_string(CapacityMethod method) {
  return method == CapacityMethod::exact_ring ? "exact_ring" : "grid_solver";
}

bool CapacityEstimate::is_infinite() const { return std::isinf(value); }

double sphere_area(int n) {
  if (n < 2) throw DimensionError("sphere area needs n >= 2");
  const double half = n / 2.0;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ring_capacity_exact(double r, double R, int n) {
  check_ring(r, R);
  return sphere_area(n) * std::pow(std::log(R / r), 1.0 - n);
}

double ring_extremal(const Point& x, const Point& center, double r, double R) {
  check_ring(r, R);
  const double rho = distance(x, center);
  if (rho <= r) return 1.0;
  if (rho >= R) return 0.0;
  return std::log(R / rho) / std::log(R / r);
}

double continua_capacity_lower_bound(double r, double R, int n, double Kn) {
  if (n < 2) throw DimensionError("lower bound needs n >= 2");
  if (!(r > 0.0) || R < r) throw InvalidRing("lower bound needs 0 < r <= R");
  if (!(Kn > 0.0)) throw ConfigError("sphere Sobolev constant must be positive");
  return std::log(R / r) / Kn;
}

double circle_transition_energy(int nodes, int gap) {
  if (nodes < 3 || gap <= 0 || gap >= nodes) throw ConfigError("gap must lie strictly between 0 and nodes");
  const double dtheta = 2.0 * std::numbers::pi / nodes;

  // Dirichlet problem on a path with `edges` edges, ends fixed to 0 and 1:
  // tridiagonal system -u_{j-1} + 2 u_j - u_{j+1} = 0 solved by the Thomas
  // algorithm, then the edge energy is summed.
  const auto arc_energy = [dtheta](int edges) {
    const int m = edges - 1;  // unknowns
    std::vector<double> u(static_cast<std::size_t>(edges + 1), 0.0);
    u.back() = 1.0;
    if (m > 0) {
      std::vector<double> c(static_cast<std::size_t>(m), 0.0);
      std::vector<double> d(static_cast<std::size_t>(m), 0.0);
      d[static_cast<std::size_t>(m - 1)] = 1.0;  // right boundary value
      c[0] = -1.0 / 2.0;
      d[0] = d[0] / 2.0;
      for (int j = 1; j < m; ++j) {
        const double denom = 2.0 + c[static_cast<std::size_t>(j - 1)];
        c[static_cast<std::size_t>(j)] = -1.0 / denom;
        d[static_cast<std::size_t>(j)] = (d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(j - 1)]) / denom;
      }
      u[static_cast<std::size_t>(m)] = d[static_cast<std::size_t>(m - 1)];
      for (int j = m - 2; j >= 0; --j) {
        u[static_cast<std::size_t>(j + 1)] =
            d[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j + 2)];
      }
    }
    double e = 0.0;
    for (int j = 0; j < edges; ++j) {
      const double du = u[static_cast<std::size_t>(j + 1)] - u[static_cast<std::size_t>(j)];
      e += du * du / dtheta;
    }
    return e;
  };
  return arc_energy(gap) + arc_energy(nodes - gap);
}

double derive_sphere_sobolev_constant(int n, int nodes) {
  if (n != 2) {
    throw DimensionError("the sphere Sobolev constant is derived for n = 2 only; supply it for n = " +
                         std::to_string(n));
  }
  double best = kInf;
  for (int gap = 1; gap < nodes; ++gap) best = std::min(best, circle_transition_energy(nodes, gap));
  return 1.0 / best;
}

SampledBody sample_region(const std::function<bool(const Point&)>& member, const Box& box, double spacing) {
  const int n = box.dim();
  std::array<std::int64_t, 3> cnt{1, 1, 1};
  for (int i = 0; i < n; ++i) {
    cnt[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor((box.hi[i] - box.lo[i]) / spacing)) + 1;
  }
  const auto at = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    Point p(n);
    p[0] = box.lo[0] + static_cast<double>(i) * spacing;
    p[1] = box.lo[1] + static_cast<double>(j) * spacing;
    if (n == 3) p[2] = box.lo[2] + static_cast<double>(k) * spacing;
    return p;
  };
  const std::size_t total = static_cast<std::size_t>(cnt[0] * cnt[1] * cnt[2]);
  std::vector<char> in(total, 0);
  const auto flat = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return static_cast<std::size_t>((k * cnt[1] + j) * cnt[0] + i);
  };
  for (std::int64_t k = 0; k < cnt[2]; ++k)
    for (std::int64_t j = 0; j < cnt[1]; ++j)
      for (std::int64_t i = 0; i < cnt[0]; ++i) in[flat(i, j, k)] = member(at(i, j, k)) ? 1 : 0;

  SampledBody body;
  body.resolution = spacing;
  for (std::int64_t k = 0; k < cnt[2]; ++k) {
    for (std::int64_t j = 0; j < cnt[1]; ++j) {
      for (std::int64_t i = 0; i < cnt[0]; ++i) {
        if (!in[flat(i, j, k)]) continue;
        bool edge = false;
        const std::array<std::int64_t, 3> c{i, j, k};
        for (int a = 0; a < n && !edge; ++a) {
          for (int dir : {-1, 1}) {
            std::array<std::int64_t, 3> q = c;
            q[static_cast<std::size_t>(a)] += dir;
            if (q[static_cast<std::size_t>(a)] < 0 || q[static_cast<std::size_t>(a)] >= cnt[static_cast<std::size_t>(a)] ||
                !in[flat(q[0], q[1], q[2])]) {
              edge = true;
              break;
            }
          }
        }
        (edge ? body.boundary : body.interior).push_back(at(i, j, k));
      }
    }
  }
  return body;
}

Condenser ring_condenser(const Point& center, double r, double R, double h) {
  check_ring(r, R);
  const int n = center.dim();
  SampledBody inner = sample_ball(Ball{center, r}, h / 2.0);
  for (const Point& p : sample_ball(Ball{center, r}, h / 4.0).boundary) inner.boundary.push_back(p);

  const double half = R + 2.0 * h;
  const Box box{center - Point::filled(n, half), center + Point::filled(n, half)};
  SampledBody outer = sample_region([&](const Point& p) { return distance(p, center) >= R; }, box, h / 2.0);
  for (const Point& p : sample_ball(Ball{center, R}, h / 4.0).boundary) outer.boundary.push_back(p);
  return Condenser{std::move(inner), std::move(outer), domains::whole_space(n)};
}

// ---------------------------------------------------------------------------
// AdmissibleField

AdmissibleField AdmissibleField::rasterize(const Condenser& condenser, double h) {
  if (!(h > 0.0)) throw ConfigError("grid size h must be positive");
  if (condenser.plate0.boundary.empty() && condenser.plate0.interior.empty()) {
    throw DegenerateBody("plate0 has no samples");
  }
  if (condenser.plate1.boundary.empty() && condenser.plate1.interior.empty()) {
    throw DegenerateBody("plate1 has no samples");
  }
  AdmissibleField f;
  f.dim_ = condenser.ambient.dim();
  f.h_ = h;

  // Grid box: ambient bounding box (when finite) joined with the plates.
  Box box{Point::filled(f.dim_, kInf), Point::filled(f.dim_, -kInf)};
  const auto grow = [&](const Point& p) {
    for (int i = 0; i < f.dim_; ++i) {
      box.lo[i] = std::min(box.lo[i], p[i]);
      box.hi[i] = std::max(box.hi[i], p[i]);
    }
  };
  for (const SampledBody* plate : {&condenser.plate0, &condenser.plate1}) {
    for (const Point& p : plate->boundary) grow(p);
    for (const Point& p : plate->interior) grow(p);
  }
  const Box& amb = condenser.ambient.bounding_box();
  bool finite_ambient = true;
  for (int i = 0; i < f.dim_; ++i) finite_ambient = finite_ambient && std::isfinite(amb.lo[i]) && std::isfinite(amb.hi[i]);
  if (finite_ambient) {
    grow(amb.lo);
    grow(amb.hi);
  }

  f.origin_ = box.lo;
  std::size_t total = 1;
  for (int i = 0; i < f.dim_; ++i) {
    f.dims_[static_cast<std::size_t>(i)] =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((box.hi[i] - box.lo[i]) / h - 1e-9)));
    total *= static_cast<std::size_t>(f.dims_[static_cast<std::size_t>(i)]);
  }
  f.stride_ = {1, static_cast<std::size_t>(f.dims_[0]), static_cast<std::size_t>(f.dims_[0] * f.dims_[1])};

  f.state_.assign(total, CellState::inactive);
  f.u_.assign(total, 0.5);
  for (std::size_t i = 0; i < total; ++i) {
    if (condenser.ambient.contains(f.cell_center(i))) f.state_[i] = CellState::free;
  }

  std::vector<std::uint8_t> mark(total, 0);
  const auto cell_of = [&](const Point& p) {
    std::size_t idx = 0;
    for (int i = 0; i < f.dim_; ++i) {
      auto c = static_cast<std::int64_t>(std::floor((p[i] - f.origin_[i]) / h));
      c = std::clamp<std::int64_t>(c, 0, f.dims_[static_cast<std::size_t>(i)] - 1);
      idx += static_cast<std::size_t>(c) * f.stride_[static_cast<std::size_t>(i)];
    }
    return idx;
  };
  for (const Point& p : condenser.plate0.boundary) mark[cell_of(p)] |= 1;
  for (const Point& p : condenser.plate0.interior) mark[cell_of(p)] |= 1;
  for (const Point& p : condenser.plate1.boundary) mark[cell_of(p)] |= 2;
  for (const Point& p : condenser.plate1.interior) mark[cell_of(p)] |= 2;
  for (std::size_t i = 0; i < total; ++i) {
    if (mark[i] == 3) f.infeasible_ = true;
    if (mark[i] & 1) {
      f.state_[i] = CellState::plate0;
      f.u_[i] = 0.0;
    } else if (mark[i] & 2) {
      f.state_[i] = CellState::plate1;
      f.u_[i] = 1.0;
    }
  }
  return f;
}

std::size_t AdmissibleField::count(CellState s) const {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

Point AdmissibleField::cell_center(std::size_t i) const {
  Point p(dim_);
  std::size_t rem = i;
  for (int a = dim_ - 1; a >= 0; --a) {
    const std::size_t c = rem / stride_[static_cast<std::size_t>(a)];
    rem -= c * stride_[static_cast<std::size_t>(a)];
    p[a] = origin_[a] + (static_cast<double>(c) + 0.5) * h_;
  }
  return p;
}

void AdmissibleField::set(std::size_t i, double v) {
  if (state_[i] == CellState::free) u_[i] = std::clamp(v, 0.0, 1.0);
}

// Index of the neighbour along `axis` in direction `dir`, or size() when it
// is off the grid.
std::size_t AdmissibleField::neighbour(std::size_t i, int axis, int dir) const {
  const std::size_t s = stride_[static_cast<std::size_t>(axis)];
  const std::size_t c = (i / s) % static_cast<std::size_t>(dims_[static_cast<std::size_t>(axis)]);
  if (dir > 0) return c + 1 < static_cast<std::size_t>(dims_[static_cast<std::size_t>(axis)]) ? i + s : size();
  return c > 0 ? i - s : size();
}

double AdmissibleField::energy(double p) const {
  const double vol = std::pow(h_, dim_);
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!active(i)) continue;
    double g2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const std::size_t j = neighbour(i, a, +1);
      if (j == size() || !active(j)) continue;
      const double g = (u_[j] - u_[i]) / h_;
      g2 += g * g;
    }
    if (g2 > 0.0) e += vol * (p == 2.0 ? g2 : std::pow(g2, p / 2.0));
  }
  return e;
}

void AdmissibleField::gradient(double p, std::vector<double>& out) const {
  out.assign(size(), 0.0);
  const double vol = std::pow(h_, dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (!active(i)) continue;
    std::array<double, 3> g{0, 0, 0};
    std::array<std::size_t, 3> nb{size(), size(), size()};
    double g2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const std::size_t j = neighbour(i, a, +1);
      if (j == size() || !active(j)) continue;
      nb[static_cast<std::size_t>(a)] = j;
      g[static_cast<std::size_t>(a)] = (u_[j] - u_[i]) / h_;
      g2 += g[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(a)];
    }
    if (g2 == 0.0) continue;
    const double w = vol * p * std::pow(g2, p / 2.0 - 1.0) / h_;
    for (int a = 0; a < dim_; ++a) {
      const std::size_t j = nb[static_cast<std::size_t>(a)];
      if (j == size()) continue;
      out[j] += w * g[static_cast<std::size_t>(a)];
      out[i] -= w * g[static_cast<std::size_t>(a)];
    }
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (state_[i] != CellState::free) out[i] = 0.0;
  }
}

void AdmissibleField::sor_sweep(double omega) {
  for (std::size_t i = 0; i < size(); ++i) {
    if (state_[i] != CellState::free) continue;
    double sum = 0.0;
    int cnt = 0;
    for (int a = 0; a < dim_; ++a) {
      for (int dir : {-1, 1}) {
        const std::size_t j = neighbour(i, a, dir);
        if (j == size() || !active(j)) continue;
        sum += u_[j];
        ++cnt;
      }
    }
    if (cnt == 0) continue;
    const double target = sum / cnt;
    u_[i] = std::clamp(u_[i] + omega * (target - u_[i]), 0.0, 1.0);
  }
}

// ---------------------------------------------------------------------------
// Solver

namespace {

double relative_decrease(double before, double after) {
  if (after <= 0.0) return before > 0.0 ? 1.0 : 0.0;
  return (before - after) / after;
}

CapacityEstimate solve_sor(AdmissibleField& field, const SolverConfig& cfg, CapacityEstimate est) {
  double longest = 1.0;
  for (int a = 0; a < field.dim(); ++a) longest = std::max(longest, static_cast<double>(field.dims()[static_cast<std::size_t>(a)]));
  const double omega = cfg.omega.value_or(2.0 / (1.0 + std::sin(std::numbers::pi / longest)));
  double e = field.energy(2.0);
  for (long it = 1; it <= cfg.max_iter; ++it) {
    field.sor_sweep(omega);
    const double next = field.energy(2.0);
    est.residual = std::abs(relative_decrease(e, next));
    est.iterations = it;
    e = next;
    if (cfg.on_iteration) cfg.on_iteration(it, e);
    if (est.residual < cfg.tol) {
      est.value = e;
      est.converged = true;
      return est;
    }
  }
  est.value = e;
  est.converged = false;
  return est;
}

CapacityEstimate solve_descent(AdmissibleField& field, const SolverConfig& cfg, CapacityEstimate est) {
  const double p = cfg.p;
  std::vector<double>& u = field.values();
  std::vector<double> g;
  std::vector<double> g_new;
  std::vector<double> trial(u.size());
  field.gradient(p, g);
  double e = field.energy(p);
  double step = std::pow(field.h(), 2.0 - field.dim()) / (8.0 * field.dim());
  constexpr double kArmijo = 1e-4;

  for (long it = 1; it <= cfg.max_iter; ++it) {
    const std::vector<double> current = u;
    double next = e;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      double slope = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        trial[i] = field.state(i) == CellState::free ? std::clamp(current[i] - step * g[i], 0.0, 1.0) : current[i];
        slope += g[i] * (trial[i] - current[i]);
      }
      u = trial;
      next = field.energy(p);
      if (next <= e + kArmijo * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      u = current;
      next = e;
    }
    field.gradient(p, g_new);
    // Barzilai-Borwein step for the next iteration.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double s = u[i] - current[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    if (sy > 0.0 && ss > 0.0) step = ss / sy;
    g.swap(g_new);

    est.residual = std::abs(relative_decrease(e, next));
    est.iterations = it;
    e = next;
    if (cfg.on_iteration) cfg.on_iteration(it, e);
    if (est.residual < cfg.tol) {
      est.value = e;
      est.converged = true;
      return est;
    }
  }
  est.value = e;
  est.converged = false;
  return est;
}

}  // namespace

CapacityEstimate grid_capacity(const Condenser& condenser, const SolverConfig& config) {
  if (!(config.p > 1.0)) throw ConfigError("capacity exponent p must exceed 1");
  if (!(config.tol > 0.0) || config.max_iter < 1) throw ConfigError("solver tolerance and iteration cap must be positive");

  CapacityEstimate est;
  est.p = config.p;
  est.method = CapacityMethod::grid_solver;
  est.grid_h = config.h;

  AdmissibleField field = AdmissibleField::rasterize(condenser, config.h);
  if (field.infeasible()) {
    est.value = kInf;
    return est;
  }
  if (field.count(CellState::plate0) == 0 || field.count(CellState::plate1) == 0) {
    throw DegenerateBody("grid does not resolve both plates");
  }

  est = config.p == 2.0 ? solve_sor(field, config, est) : solve_descent(field, config, est);
  if (!est.converged) {
    throw NonConvergence("capacity solver hit max_iter=" + std::to_string(config.max_iter) +
                             " with residual " + std::to_string(est.residual),
                         est);
  }
  return est;
}

}  // namespace qcw
