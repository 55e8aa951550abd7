#include "cpsopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cpsopt {

namespace {

constexpr double kBig = 1e20;

using Local = std::span<const double>;

double sq(double v) { return v * v; }

CpsProblem unconstrained(std::string name, int n, std::vector<Element> els,
                         Vector x0) {
  return CpsProblem(std::move(name), n, std::move(els),
                    Vector::Constant(n, -kBig), Vector::Constant(n, kBig),
                    std::move(x0));
}

StructureStats stats(int n, int q, int size, int t, int group) {
  StructureStats s;
  s.n = n;
  s.q = q;
  s.max_element_size = size;
  s.t = t;
  s.max_group = group;
  return s;
}

std::array<std::vector<int>, 4> standard_dims() {
  return {std::vector<int>{10}, {50, 100}, {500, 1000}, {5000, 10000}};
}

// ---------------------------------------------------------------- EXAMPLE5

double ex_f1(Local u) { return std::sqrt(u[0] * u[0] + u[1] * u[1]); }
double ex_f2(Local u) { return sq(std::sin(u[0]) - 23.0 * u[1] * u[0]); }
// Local indexing: u = (x1, x2, x4, x5).
double ex_f3(Local u) { return sq(u[0] * u[0] * u[0] - 56.0 * u[1] * u[2]) - u[3]; }
double ex_f4(Local u) { return std::max(std::abs(u[0]), std::abs(u[1])); }
double ex_f5(Local u) { return std::sqrt(u[0] * u[0] + u[1] * u[1]); }

CpsProblem make_example5(int n) {
  std::vector<Element> els = {
      {{0, 1}, ex_f1}, {{1, 2}, ex_f2}, {{0, 1, 3, 4}, ex_f3},
      {{3, 4}, ex_f4}, {{3, 4}, ex_f5}};
  return unconstrained("EXAMPLE5", n, std::move(els), Vector::Ones(n));
}

double example5_ref(int, const Vector& x) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1]) +
         sq(std::sin(x[1]) - 23.0 * x[2] * x[1]) +
         sq(std::pow(x[0], 3) - 56.0 * x[1] * x[3]) - x[4] +
         std::max(std::abs(x[3]), std::abs(x[4])) + std::hypot(x[3], x[4]);
}

// ----------------------------------------------------------------- ARWHEAD

CpsProblem make_arwhead(int n) {
  std::vector<Element> els;
  for (int i = 0; i + 1 < n; ++i) {
    els.push_back({{i, n - 1}, [](Local u) {
                     return sq(u[0] * u[0] + u[1] * u[1]) - 4.0 * u[0] + 3.0;
                   }});
  }
  return unconstrained("ARWHEAD", n, std::move(els), Vector::Ones(n));
}

double arwhead_ref(int n, const Vector& x) {
  double f = 0.0;
  const double xn2 = x[n - 1] * x[n - 1];
  for (int i = 0; i < n - 1; ++i) f += sq(x[i] * x[i] + xn2) - 4.0 * x[i] + 3.0;
  return f;
}

// ----------------------------------------------------------------- BDQRTIC

CpsProblem make_bdqrtic(int n) {
  std::vector<Element> els;
  for (int i = 0; i + 4 < n; ++i) {
    els.push_back({{i, i + 1, i + 2, i + 3, n - 1}, [](Local u) {
                     return sq(-4.0 * u[0] + 3.0) +
                            sq(u[0] * u[0] + 2.0 * u[1] * u[1] +
                               3.0 * u[2] * u[2] + 4.0 * u[3] * u[3] +
                               5.0 * u[4] * u[4]);
                   }});
  }
  return unconstrained("BDQRTIC", n, std::move(els), Vector::Ones(n));
}

double bdqrtic_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n - 4; ++i) {
    f += sq(-4.0 * x[i] + 3.0) +
         sq(x[i] * x[i] + 2.0 * x[i + 1] * x[i + 1] +
            3.0 * x[i + 2] * x[i + 2] + 4.0 * x[i + 3] * x[i + 3] +
            5.0 * x[n - 1] * x[n - 1]);
  }
  return f;
}

// ------------------------------------------------------------------ BEALES

double beale(double a, double b) {
  return sq(1.5 - a * (1.0 - b)) + sq(2.25 - a * (1.0 - b * b)) +
         sq(2.625 - a * (1.0 - b * b * b));
}

CpsProblem make_beales(int n) {
  std::vector<Element> els;
  for (int i = 0; i < n; i += 2) {
    els.push_back({{i, i + 1}, [](Local u) { return beale(u[0], u[1]); }});
  }
  return unconstrained("BEALES", n, std::move(els), Vector::Ones(n));
}

double beales_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n; i += 2) {
    const double a = x[i], b = x[i + 1];
    f += sq(1.5 - a + a * b) + sq(2.25 - a + a * b * b) +
         sq(2.625 - a + a * b * b * b);
  }
  return f;
}

// ---------------------------------------------------------------- BROYDN3D
//
// Residuals r_i = (3 - 2 x_i) x_i - x_{i-1} - 2 x_{i+1} + 1 with zero
// boundary values.  The last two residuals share one element, which gives
// q = n - 1 elements of at most three variables.

double broyden_residual(double prev, double cur, double next) {
  return (3.0 - 2.0 * cur) * cur - prev - 2.0 * next + 1.0;
}

CpsProblem make_broydn3d(int n) {
  std::vector<Element> els;
  for (int i = 0; i + 2 < n; ++i) {
    if (i == 0) {
      els.push_back({{0, 1}, [](Local u) {
                       return sq(broyden_residual(0.0, u[0], u[1]));
                     }});
    } else {
      els.push_back({{i - 1, i, i + 1}, [](Local u) {
                       return sq(broyden_residual(u[0], u[1], u[2]));
                     }});
    }
  }
  if (n == 2) {
    els.push_back({{0, 1}, [](Local u) {
                     return sq(broyden_residual(0.0, u[0], u[1])) +
                            sq(broyden_residual(u[0], u[1], 0.0));
                   }});
  } else {
    els.push_back({{n - 3, n - 2, n - 1}, [](Local u) {
                     return sq(broyden_residual(u[0], u[1], u[2])) +
                            sq(broyden_residual(u[1], u[2], 0.0));
                   }});
  }
  return unconstrained("BROYDN3D", n, std::move(els), Vector::Constant(n, -1.0));
}

double broydn3d_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n; ++i) {
    const double prev = i > 0 ? x[i - 1] : 0.0;
    const double next = i + 1 < n ? x[i + 1] : 0.0;
    f += sq((3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0);
  }
  return f;
}

// ------------------------------------------------------------------ ENGVAL

CpsProblem make_engval(int n) {
  std::vector<Element> els;
  for (int i = 0; i + 1 < n; ++i) {
    els.push_back({{i, i + 1}, [](Local u) {
                     return sq(u[0] * u[0] + u[1] * u[1]) - 4.0 * u[0] + 3.0;
                   }});
  }
  return unconstrained("ENGVAL", n, std::move(els), Vector::Constant(n, 2.0));
}

double engval_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    f += std::pow(x[i] * x[i] + x[i + 1] * x[i + 1], 2) - 4.0 * x[i] + 3.0;
  }
  return f;
}

// ---------------------------------------------------------------- FREUROTH

double freuroth_pair(double a, double b) {
  return sq(a - 13.0 + ((5.0 - b) * b - 2.0) * b) +
         sq(a - 29.0 + ((b + 1.0) * b - 14.0) * b);
}

CpsProblem make_freuroth(int n) {
  std::vector<Element> els;
  for (int i = 0; i + 1 < n; ++i) {
    els.push_back(
        {{i, i + 1}, [](Local u) { return freuroth_pair(u[0], u[1]); }});
  }
  Vector x0 = Vector::Zero(n);
  x0[0] = 0.5;
  x0[1] = -2.0;
  return unconstrained("FREUROTH", n, std::move(els), std::move(x0));
}

double freuroth_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const double b = x[i + 1];
    f += sq(x[i] - 13.0 + 5.0 * b * b - b * b * b - 2.0 * b) +
         sq(x[i] - 29.0 + b * b * b + b * b - 14.0 * b);
  }
  return f;
}

// ------------------------------------------------------------------ MOREBV
//
// Moré boundary value problem; the canonical start t(t-1) is scaled by
// log10(n).

CpsProblem make_morebv(int n) {
  const double h = 1.0 / (n + 1);
  std::vector<Element> els;
  for (int i = 0; i < n; ++i) {
    const double ti = (i + 1) * h;
    const bool has_prev = i > 0;
    const bool has_next = i + 1 < n;
    std::vector<int> vars;
    if (has_prev) vars.push_back(i - 1);
    vars.push_back(i);
    if (has_next) vars.push_back(i + 1);
    els.push_back({vars, [=](Local u) {
                     std::size_t k = 0;
                     const double prev = has_prev ? u[k++] : 0.0;
                     const double cur = u[k++];
                     const double next = has_next ? u[k] : 0.0;
                     const double c = cur + ti + 1.0;
                     return sq(2.0 * cur - prev - next + 0.5 * h * h * c * c * c);
                   }});
  }
  Vector x0(n);
  const double scale = std::log10(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    const double ti = (i + 1) * h;
    x0[i] = ti * (ti - 1.0) * scale;
  }
  return unconstrained("MOREBV", n, std::move(els), std::move(x0));
}

double morebv_ref(int n, const Vector& x) {
  const double h = 1.0 / (n + 1);
  double f = 0.0;
  for (int i = 0; i < n; ++i) {
    const double prev = i > 0 ? x[i - 1] : 0.0;
    const double next = i + 1 < n ? x[i + 1] : 0.0;
    const double t = (i + 1) * h;
    f += sq(2.0 * x[i] - prev - next + h * h * std::pow(x[i] + t + 1.0, 3) / 2.0);
  }
  return f;
}

// -------------------------------------------------------------------- NZF1
//
// Groups of 13 consecutive variables; position 7 of each group is linked to
// position 7 of the next group.

CpsProblem make_nzf1(int n) {
  const int groups = n / 13;
  std::vector<Element> els;
  for (int g = 0; g < groups; ++g) {
    const int o = 13 * g - 1;  // x_{o+p} for 1-based position p
    els.push_back({{o + 1, o + 2, o + 3}, [](Local u) {
                     return sq(3.0 * u[0] - 60.0 + sq(u[1] - u[2]) / 10.0);
                   }});
    els.push_back({{o + 2, o + 3, o + 4, o + 5, o + 6, o + 7}, [](Local u) {
                     // u = (x2, x3, x4, x5, x6, x7)
                     const double denom =
                         1.0 + u[3] * u[3] + std::sin(u[3] / 1000.0);
                     return sq(u[0] * u[0] + u[1] * u[1] +
                               u[2] * u[2] * sq(1.0 + u[2]) + u[5] +
                               u[4] / denom);
                   }});
    els.push_back({{o + 7, o + 8, o + 9, o + 11}, [](Local u) {
                     return sq(u[0] + u[1] - u[2] * u[2] + u[3]);
                   }});
    els.push_back({{o + 11, o + 12, o + 13}, [](Local u) {
                     return sq(std::log(1.0 + u[0] * u[0]) + u[1] - 5.0 * u[2] +
                               20.0);
                   }});
    els.push_back({{o + 5, o + 6, o + 10}, [](Local u) {
                     // u = (x5, x6, x10)
                     return sq(u[0] + u[1] + u[1] * u[2] + 10.0 * u[2] - 50.0);
                   }});
  }
  for (int g = 0; g + 1 < groups; ++g) {
    const int a = 13 * g + 6;
    els.push_back({{a, a + 13}, [](Local u) { return sq(u[0] - u[1]); }});
  }
  return unconstrained("NZF1", n, std::move(els), Vector::Ones(n));
}

double nzf1_ref(int n, const Vector& x) {
  const int groups = n / 13;
  // 1-based accessor within group g
  auto v = [&](int g, int p) { return x[13 * g + p - 1]; };
  double f = 0.0;
  for (int g = 0; g < groups; ++g) {
    f += std::pow(3.0 * v(g, 1) - 60.0 + 0.1 * std::pow(v(g, 2) - v(g, 3), 2), 2);
    f += std::pow(v(g, 2) * v(g, 2) + v(g, 3) * v(g, 3) +
                      v(g, 4) * v(g, 4) * std::pow(1.0 + v(g, 4), 2) + v(g, 7) +
                      v(g, 6) / (1.0 + v(g, 5) * v(g, 5) +
                                 std::sin(v(g, 5) / 1000.0)),
                  2);
    f += std::pow(v(g, 7) + v(g, 8) - v(g, 9) * v(g, 9) + v(g, 11), 2);
    f += std::pow(std::log(1.0 + v(g, 11) * v(g, 11)) + v(g, 12) -
                      5.0 * v(g, 13) + 20.0,
                  2);
    f += std::pow(v(g, 5) + v(g, 6) + v(g, 6) * v(g, 10) + 10.0 * v(g, 10) - 50.0,
                  2);
  }
  for (int g = 0; g + 1 < groups; ++g) f += std::pow(v(g, 7) - v(g + 1, 7), 2);
  return f;
}

// ----------------------------------------------------------------- POWSING

double powell_block(double a, double b, double c, double d) {
  return sq(a + 10.0 * b) + 5.0 * sq(c - d) + std::pow(b - 2.0 * c, 4) +
         10.0 * std::pow(a - d, 4);
}

CpsProblem make_powsing(int n) {
  std::vector<Element> els;
  for (int i = 0; i < n; i += 4) {
    els.push_back({{i, i + 1, i + 2, i + 3}, [](Local u) {
                     return powell_block(u[0], u[1], u[2], u[3]);
                   }});
  }
  Vector x0(n);
  for (int i = 0; i < n; i += 4) {
    x0[i] = 3.0;
    x0[i + 1] = -1.0;
    x0[i + 2] = 0.0;
    x0[i + 3] = 1.0;
  }
  return unconstrained("POWSING", n, std::move(els), std::move(x0));
}

double powsing_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n; i += 4) {
    f += std::pow(x[i] + 10.0 * x[i + 1], 2) +
         5.0 * std::pow(x[i + 2] - x[i + 3], 2) +
         std::pow(x[i + 1] - 2.0 * x[i + 2], 4) +
         10.0 * std::pow(x[i] - x[i + 3], 4);
  }
  return f;
}

// ----------------------------------------------------------------- ROSENBR

CpsProblem make_rosenbr(int n) {
  std::vector<Element> els;
  for (int i = 0; i < n; i += 2) {
    els.push_back({{i, i + 1}, [](Local u) {
                     return 100.0 * sq(u[1] - u[0] * u[0]) + sq(1.0 - u[0]);
                   }});
  }
  Vector x0(n);
  for (int i = 0; i < n; i += 2) {
    x0[i] = -1.2;
    x0[i + 1] = 1.0;
  }
  return unconstrained("ROSENBR", n, std::move(els), std::move(x0));
}

double rosenbr_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n; i += 2) {
    f += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
  }
  return f;
}

// ------------------------------------------------------------------ TRIDIA

CpsProblem make_tridia(int n) {
  std::vector<Element> els;
  els.push_back({{0}, [](Local u) { return sq(u[0] - 1.0); }});
  for (int i = 1; i < n; ++i) {
    const double w = i + 1;
    els.push_back({{i - 1, i}, [w](Local u) {
                     return w * sq(2.0 * u[1] - u[0]);
                   }});
  }
  return unconstrained("TRIDIA", n, std::move(els), Vector::Ones(n));
}

double tridia_ref(int n, const Vector& x) {
  double f = std::pow(x[0] - 1.0, 2);
  for (int i = 2; i <= n; ++i) {
    f += i * std::pow(2.0 * x[i - 1] - x[i - 2], 2);
  }
  return f;
}

// ------------------------------------------------------------------- WOODS

double wood_block(double a, double b, double c, double d) {
  return 100.0 * sq(b - a * a) + sq(1.0 - a) + 90.0 * sq(d - c * c) +
         sq(1.0 - c) + 10.1 * (sq(b - 1.0) + sq(d - 1.0)) +
         19.8 * (b - 1.0) * (d - 1.0);
}

CpsProblem make_woods(int n) {
  std::vector<Element> els;
  for (int i = 0; i < n; i += 4) {
    els.push_back({{i, i + 1, i + 2, i + 3}, [](Local u) {
                     return wood_block(u[0], u[1], u[2], u[3]);
                   }});
  }
  Vector x0(n);
  for (int i = 0; i < n; i += 4) {
    x0[i] = -3.0;
    x0[i + 1] = -1.0;
    x0[i + 2] = -3.0;
    x0[i + 3] = -1.0;
  }
  return unconstrained("WOODS", n, std::move(els), std::move(x0));
}

double woods_ref(int n, const Vector& x) {
  double f = 0.0;
  for (int i = 0; i < n; i += 4) {
    const double a = x[i], b = x[i + 1], c = x[i + 2], d = x[i + 3];
    f += 100.0 * std::pow(b - a * a, 2) + std::pow(1.0 - a, 2) +
         90.0 * std::pow(d - c * c, 2) + std::pow(1.0 - c, 2) +
         10.1 * (std::pow(b - 1.0, 2) + std::pow(d - 1.0, 2)) +
         19.8 * (b - 1.0) * (d - 1.0);
  }
  return f;
}

// ----------------------------------------------------------------- CONTACT
//
// Bilinear membrane over an m x m node grid on the unit square (n = m^2,
// row-major by y).  Boundary nodes are fixed to b(x, y) through equal
// bounds; interior nodes over [0.4, 0.6]^2 lie above an obstacle of height
// 10.

double contact_boundary(double x, double y) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return 1.0 + 8.0 * x + 4.0 * y + 3.0 * std::sin(two_pi * x) * std::sin(two_pi * y);
}

int contact_side(int n) {
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return m;
}

bool contact_on_obstacle(double x, double y) {
  constexpr double lo = 0.4, hi = 0.6, tol = 1e-12;
  return x >= lo - tol && x <= hi + tol && y >= lo - tol && y <= hi + tol;
}

CpsProblem make_contact(int n) {
  const int m = contact_side(n);
  const int q = (m - 1) * (m - 1);
  const double inv_q = 1.0 / q;
  std::vector<Element> els;
  for (int b = 0; b + 1 < m; ++b) {
    for (int a = 0; a + 1 < m; ++a) {
      const int sw = b * m + a;
      // sorted: SW, SE, NW, NE
      els.push_back({{sw, sw + 1, sw + m, sw + m + 1}, [inv_q](Local u) {
                       return inv_q * std::sqrt(1.0 + sq(u[0] - u[3]) +
                                                sq(u[1] - u[2]));
                     }});
    }
  }
  Vector lower(n), upper(n), start(n);
  const double h = 1.0 / (m - 1);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const int j = b * m + a;
      const double x = a * h, y = b * h;
      const double bv = contact_boundary(x, y);
      if (a == 0 || b == 0 || a == m - 1 || b == m - 1) {
        lower[j] = upper[j] = bv;
      } else {
        lower[j] = contact_on_obstacle(x, y) ? 10.0 : -kBig;
        upper[j] = kBig;
      }
      start[j] = bv;
    }
  }
  Vector x0 = project_to_bounds(lower, upper, start);
  return CpsProblem("CONTACT", n, std::move(els), std::move(lower),
                    std::move(upper), std::move(x0));
}

double contact_ref(int n, const Vector& x) {
  const int m = contact_side(n);
  const double q = static_cast<double>((m - 1) * (m - 1));
  double f = 0.0;
  for (int b = 0; b + 1 < m; ++b) {
    for (int a = 0; a + 1 < m; ++a) {
      const double sw = x[b * m + a], se = x[b * m + a + 1];
      const double nw = x[(b + 1) * m + a], ne = x[(b + 1) * m + a + 1];
      f += std::sqrt(1.0 + (sw - ne) * (sw - ne) + (se - nw) * (se - nw)) / q;
    }
  }
  return f;
}

bool is_perfect_square(int n) {
  const int m = contact_side(n);
  return m * m == n;
}

std::vector<ProblemSpecEntry> build_registry() {
  std::vector<ProblemSpecEntry> r;
  auto at_least = [](int lo) { return [lo](int n) { return n >= lo; }; };

  r.push_back({"ARWHEAD", standard_dims(), "n >= 3", at_least(3), make_arwhead,
               arwhead_ref, [](int n) { return stats(n, n - 1, 2, 2, 1); }});
  r.push_back({"BDQRTIC", standard_dims(), "n >= 10", at_least(10),
               make_bdqrtic, bdqrtic_ref,
               [](int n) { return stats(n, n - 4, 5, 5, 1); }});
  r.push_back({"BEALES", standard_dims(), "even n >= 2",
               [](int n) { return n >= 2 && n % 2 == 0; }, make_beales,
               beales_ref, [](int n) { return stats(n, n / 2, 2, 1, 2); }});
  r.push_back({"BROYDN3D", standard_dims(), "n >= 4", at_least(4),
               make_broydn3d, broydn3d_ref,
               [](int n) { return stats(n, n - 1, 3, 3, 1); }});
  r.push_back({"CONTACT",
               {std::vector<int>{16}, {64, 144}, {400, 900}, {2500, 4900}},
               "n = m^2 with m >= 4", [](int n) {
                 return n >= 16 && is_perfect_square(n);
               },
               make_contact, contact_ref, [](int n) {
                 const int m = contact_side(n);
                 return stats(n, (m - 1) * (m - 1), 4, 4, 1);
               }});
  r.push_back({"ENGVAL", standard_dims(), "n >= 3", at_least(3), make_engval,
               engval_ref, [](int n) { return stats(n, n - 1, 2, 2, 1); }});
  r.push_back({"EXAMPLE5", {std::vector<int>{}, {}, {}, {}}, "n = 5",
               [](int n) { return n == 5; }, make_example5, example5_ref,
               [](int n) { return stats(n, 5, 4, 3, 2); }});
  r.push_back({"FREUROTH", standard_dims(), "n >= 3", at_least(3),
               make_freuroth, freuroth_ref,
               [](int n) { return stats(n, n - 1, 2, 2, 1); }});
  r.push_back({"MOREBV",
               {std::vector<int>{12}, {52, 102}, {502, 1002}, {5002, 10002}},
               "n >= 3", at_least(3), make_morebv, morebv_ref,
               [](int n) { return stats(n, n, 3, 3, 1); }});
  r.push_back({"NZF1",
               {std::vector<int>{13}, {39, 130}, {650, 1300}, {6500, 13000}},
               "n = 13 l with l >= 1",
               [](int n) { return n >= 13 && n % 13 == 0; }, make_nzf1,
               nzf1_ref,
               [](int n) { return stats(n, 7 * n / 13 - 2, 6, 4, 2); }});
  r.push_back({"POWSING",
               {std::vector<int>{20}, {52, 100}, {500, 1000}, {5000, 10000}},
               "n = 4 l with l >= 1",
               [](int n) { return n >= 4 && n % 4 == 0; }, make_powsing,
               powsing_ref, [](int n) { return stats(n, n / 4, 4, 1, 4); }});
  r.push_back({"ROSENBR", standard_dims(), "even n >= 2",
               [](int n) { return n >= 2 && n % 2 == 0; }, make_rosenbr,
               rosenbr_ref, [](int n) { return stats(n, n / 2, 2, 1, 2); }});
  r.push_back({"TRIDIA", standard_dims(), "n >= 2", at_least(2), make_tridia,
               tridia_ref, [](int n) { return stats(n, n, 2, 2, 1); }});
  r.push_back({"WOODS",
               {std::vector<int>{20}, {40, 200}, {400, 2000}, {4000, 10000}},
               "n = 4 l with l >= 1",
               [](int n) { return n >= 4 && n % 4 == 0; }, make_woods,
               woods_ref, [](int n) { return stats(n, n / 4, 4, 1, 4); }});
  return r;
}

}  // namespace

SizeClass parse_size_class(const std::string& s) {
  if (s == "small") return SizeClass::kSmall;
  if (s == "smallish") return SizeClass::kSmallish;
  if (s == "medium") return SizeClass::kMedium;
  if (s == "large") return SizeClass::kLarge;
  throw std::invalid_argument("unknown size class '" + s +
                              "' (expected small|smallish|medium|large)");
}

std::string to_string(SizeClass c) {
  switch (c) {
    case SizeClass::kSmall: return "small";
    case SizeClass::kSmallish: return "smallish";
    case SizeClass::kMedium: return "medium";
    case SizeClass::kLarge: return "large";
  }
  return "?";
}

std::vector<int> ProblemSpecEntry::all_dims() const {
  std::vector<int> out;
  for (const auto& d : dims) out.insert(out.end(), d.begin(), d.end());
  return out;
}

const std::vector<ProblemSpecEntry>& problem_registry() {
  static const std::vector<ProblemSpecEntry> registry = build_registry();
  return registry;
}

const ProblemSpecEntry& find_problem(const std::string& name) {
  for (const auto& e : problem_registry()) {
    if (e.name == name) return e;
  }
  std::ostringstream msg;
  msg << "unknown problem '" << name << "'; registered:";
  for (const auto& e : problem_registry()) msg << ' ' << e.name;
  throw std::invalid_argument(msg.str());
}

namespace {

void require_admissible(const ProblemSpecEntry& e, int n) {
  if (e.admissible(n)) return;
  std::ostringstream msg;
  msg << "n=" << n << " is not admissible for " << e.name << " ("
      << e.admissible_rule << ")";
  const auto dims = e.all_dims();
  if (!dims.empty()) {
    msg << "; tabulated sizes:";
    for (int d : dims) msg << ' ' << d;
  }
  throw std::invalid_argument(msg.str());
}

}  // namespace

CpsProblem instantiate(const std::string& name, int n) {
  const auto& e = find_problem(name);
  require_admissible(e, n);
  return e.generator(n);
}

double reference_value(const std::string& name, int n, const Vector& x) {
  const auto& e = find_problem(name);
  require_admissible(e, n);
  if (x.size() != n) throw std::invalid_argument("dimension mismatch");
  const double v = e.reference(n, x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

std::vector<std::pair<std::string, int>> problem_set(SizeClass c) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& e : problem_registry()) {
    for (int n : e.dims[static_cast<int>(c)]) out.emplace_back(e.name, n);
  }
  return out;
}

}  // namespace cpsopt
