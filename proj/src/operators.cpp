#include "gencahn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gencahn/error.hpp"

namespace gencahn {

namespace {

// Applies a per-axis n x n matrix (or its transpose) along one axis of a
// row-major array of shape (n0, n1).
void apply_axis(const std::vector<double>& matrix, bool transpose, std::size_t n0, std::size_t n1,
                std::size_t axis, const std::vector<double>& in, std::vector<double>& out) {
  const std::size_t n = axis == 0 ? n0 : n1;
  out.assign(in.size(), 0.0);
  auto m = [&](std::size_t r, std::size_t c) {
    return transpose ? matrix[c * n + r] : matrix[r * n + c];
  };
  if (axis == 0) {
    for (std::size_t k = 0; k < n0; ++k) {
      double* dst = out.data() + k * n1;
      for (std::size_t j = 0; j < n0; ++j) {
        const double a = m(k, j);
        const double* src = in.data() + j * n1;
        for (std::size_t i = 0; i < n1; ++i) dst[i] += a * src[i];
      }
    }
  } else {
    for (std::size_t r = 0; r < n0; ++r) {
      const double* src = in.data() + r * n1;
      double* dst = out.data() + r * n1;
      for (std::size_t k = 0; k < n1; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n1; ++j) s += m(k, j) * src[j];
        dst[k] = s;
      }
    }
  }
}

std::size_t extent(const Grid& g, std::size_t axis) { return axis < g.dim() ? g.cells(axis) : 1; }

Field cosine_transform(const Field& u, bool inverse) {
  const Grid& g = u.grid();
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = extent(g, 1);
  std::vector<double> a(u.values().begin(), u.values().end());
  std::vector<double> b;
  apply_axis(g.basis(0).matrix, inverse, n0, n1, 0, a, b);
  if (g.dim() == 2) {
    apply_axis(g.basis(1).matrix, inverse, n0, n1, 1, b, a);
    return Field(u.grid_ptr(), std::move(a));
  }
  return Field(u.grid_ptr(), std::move(b));
}

}  // namespace

Field laplacian(const Field& u) {
  const Grid& g = u.grid();
  Field out(u.grid_ptr());
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = extent(g, 1);
  const double inv_h0 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double inv_h1 = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t c = i * n1 + j;
      const double uc = u[c];
      double acc = 0.0;
      // Ghost reflection makes the boundary flux vanish, so only interior
      // neighbours contribute.
      if (i > 0) acc += (uc - u[c - n1]) * inv_h0;
      if (i + 1 < n0) acc += (uc - u[c + n1]) * inv_h0;
      if (g.dim() == 2) {
        if (j > 0) acc += (uc - u[c - 1]) * inv_h1;
        if (j + 1 < n1) acc += (uc - u[c + 1]) * inv_h1;
      }
      out[c] = acc;
    }
  }
  return out;
}

double mean(const Field& u) {
  // Uniform cell weights: the volume-weighted mean is the arithmetic mean.
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s / static_cast<double>(u.size());
}

Field project_zero_mean(const Field& u) {
  Field out = u;
  out += -mean(u);
  return out;
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s * u.grid().cell_volume();
}

double lq_norm(const Field& u, double q) {
  if (q == 2.0) return l2_norm(u);
  const double scale = u.max_abs();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : u.values()) s += std::pow(std::abs(v) / scale, q);
  return scale * std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }

double gradient_l2(const Field& u) {
  const Grid& g = u.grid();
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = extent(g, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t c = i * n1 + j;
      if (i + 1 < n0) {
        const double d = (u[c + n1] - u[c]) / g.spacing(0);
        s += d * d;
      }
      if (g.dim() == 2 && j + 1 < n1) {
        const double d = (u[c + 1] - u[c]) / g.spacing(1);
        s += d * d;
      }
    }
  }
  return std::sqrt(s * g.cell_volume());
}

Field to_cosine(const Field& u) { return cosine_transform(u, false); }
Field from_cosine(const Field& coefficients) { return cosine_transform(coefficients, true); }

double eigenvalue(const Grid& grid, std::size_t flat_index) {
  if (grid.dim() == 1) return grid.basis(0).eigenvalues[flat_index];
  const std::size_t n1 = grid.cells(1);
  return grid.basis(0).eigenvalues[flat_index / n1] + grid.basis(1).eigenvalues[flat_index % n1];
}

Field inv_laplacian(const Field& v) {
  const double m = mean(v);
  if (std::abs(m) > 1e-10 * (1.0 + v.max_abs())) {
    throw Error(ErrorKind::NonZeroMeanInput,
                "inv_laplacian needs a zero-mean input, got mean " + std::to_string(m));
  }
  Field c = to_cosine(v);
  const Grid& g = v.grid();
  c[0] = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) c[k] /= eigenvalue(g, k);
  return from_cosine(c);
}

Field lowpass(const Field& u, std::size_t cutoff) {
  Field c = to_cosine(u);
  const Grid& g = u.grid();
  const std::size_t n1 = extent(g, 1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const std::size_t k0 = k / n1;
    const std::size_t k1 = k % n1;
    if (k0 >= cutoff || (g.dim() == 2 && k1 >= cutoff)) c[k] = 0.0;
  }
  return from_cosine(c);
}

double neg_sobolev_norm(const Field& v, double q) {
  return lq_norm(inv_laplacian(project_zero_mean(v)), q);
}

NormReport norms(const Field& u, std::optional<double> q) {
  if (q && !(*q > 2.0 && *q < 6.0)) {
    throw Error(ErrorKind::QOutOfRange, "q must lie in (2,6), got " + std::to_string(*q));
  }
  NormReport r;
  r.mean = mean(u);
  r.l2 = l2_norm(u);
  const double grad2 = std::max(0.0, inner(laplacian(u), u));
  r.v_norm = std::sqrt(grad2 + r.mean * r.mean);
  const Field centred = project_zero_mean(u);
  const Field nu = inv_laplacian(centred);
  // <v, N(v - m)> = <v - m, N(v - m)> because N(.) has zero mean.
  const double dual2 = std::max(0.0, inner(centred, nu));
  r.v_dual_norm = std::sqrt(dual2 + r.mean * r.mean);
  if (q) r.neg_sobolev = NegSobolevNorm{*q, lq_norm(nu, *q)};
  return r;
}

namespace {

// Zero of c -> m(|u - c|^{q-2}(u - c)); the map is strictly decreasing.
double optimal_shift(const Field& u, double q) {
  auto moment = [&](double c) {
    double s = 0.0;
    for (double x : u.values()) {
      const double d = x - c;
      s += std::pow(std::abs(d), q - 2.0) * d;
    }
    return s;
  };
  double lo = *std::min_element(u.values().begin(), u.values().end());
  double hi = *std::max_element(u.values().begin(), u.values().end());
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (moment(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Field holder_dual(const Field& u, double q) {
  Field g(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = std::pow(std::abs(u[i]), q - 2.0) * u[i];
  return g;
}

}  // namespace

IsometryWitness isometry_witness(const Field& v, double q) {
  if (!(q > 2.0 && q < 6.0)) {
    throw Error(ErrorKind::QOutOfRange, "q must lie in (2,6), got " + std::to_string(q));
  }
  if (v.max_abs() == 0.0) throw Error(ErrorKind::ZeroInput, "witness undefined for v = 0");
  const Field nv = inv_laplacian(v);
  const double q_conj = q / (q - 1.0);

  IsometryWitness out;
  const Field g = project_zero_mean(holder_dual(nv, q));
  out.z = inv_laplacian(g);
  const Field az = laplacian(out.z);
  out.ratio = inner(az, nv) / (lq_norm(az, q_conj) * lq_norm(nv, q));

  out.optimal_shift = optimal_shift(nv, q);
  Field shifted = nv;
  shifted += -out.optimal_shift;
  const Field gq = project_zero_mean(holder_dual(shifted, q));
  const Field azq = laplacian(inv_laplacian(gq));
  out.quotient_ratio = inner(azq, nv) / (lq_norm(azq, q_conj) * lq_norm(shifted, q));
  return out;
}

PoincareGap poincare_gap(const Field& w, double p) {
  Field composed(w.grid_ptr());
  for (std::size_t i = 0; i < w.size(); ++i) composed[i] = std::pow(std::abs(w[i]), p) * w[i];
  PoincareGap gap;
  gap.rhs_grad = gradient_l2(composed);
  const double m = mean(composed);
  gap.lhs = std::sqrt(std::max(0.0, inner(laplacian(composed), composed)) + m * m);
  gap.rhs_mean = std::pow(std::abs(mean(w)), p + 1.0);
  return gap;
}

}  // namespace gencahn
