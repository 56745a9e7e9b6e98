#include "torusdec/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "torusdec/error.hpp"
#include "torusdec/granulation.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {
namespace {

constexpr double kPi = std::numbers::pi;

double reduce_angle(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

// Distance on P^1 parametrized by [0, pi).
double angle_distance(double a, double b) {
  const double d = std::abs(reduce_angle(a) - reduce_angle(b));
  return std::min(d, kPi - d);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double signed_freq(std::size_t k, std::size_t p) {
  return k < (p + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(p);
}

// Antiderivative of the 1-D bump on [-1, 1], from 0 to 1.
double bump_cdf(double u) {
  u = std::clamp(u, -1.0, 1.0);
  const double u2 = u * u;
  const double poly = u * (1.0 - u2 * (4.0 / 3.0 - u2 * (6.0 / 5.0 - u2 * (4.0 / 7.0 - u2 / 9.0))));
  return 0.5 + (315.0 / 256.0) * poly;
}

struct Grid1 {
  double x0 = 0.0;
  double h = 0.0;
  std::size_t n = 0;
};

Grid1 make_grid1(double lo, double hi, double h, std::size_t cap) {
  Grid1 g;
  g.x0 = lo;
  g.h = h;
  g.n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
  if (g.n > cap) {
    g.n = cap;
    g.h = (hi - lo) / static_cast<double>(cap - 1);
  }
  return g;
}

// Density samples of the projected measure convolved with Psi_r at cell centres.
std::vector<double> psi_density(std::span<const Atom1> atoms, double r, const Grid1& g) {
  std::vector<double> phi(g.n, 0.0);
  for (const Atom1& a : atoms) {
    if (a.w == 0.0) continue;
    const auto lo = static_cast<std::int64_t>(std::floor((a.x - r - g.x0) / g.h - 0.5));
    const auto hi = static_cast<std::int64_t>(std::ceil((a.x + r - g.x0) / g.h - 0.5));
    for (std::int64_t i = std::max<std::int64_t>(lo, 0);
         i <= std::min<std::int64_t>(hi, static_cast<std::int64_t>(g.n) - 1); ++i) {
      const double xc = g.x0 + (static_cast<double>(i) + 0.5) * g.h;
      phi[static_cast<std::size_t>(i)] += a.w * marginal_psi((xc - a.x) / r) / r;
    }
  }
  return phi;
}

double riesz_constant(double alpha, double d) {
  return std::pow(kPi, alpha - d / 2.0) * std::tgamma((d - alpha) / 2.0) / std::tgamma(alpha / 2.0);
}

// Integral over [-1,1]^2 of (1-|v1|)(1-|v2|) |k + v|^-alpha.
double cell_kernel_2d(std::int64_t kx, std::int64_t ky, double alpha) {
  const std::int64_t far = std::max(std::abs(kx), std::abs(ky));
  if (far == 0) {
    // Singular part in closed form: int_{[-1,1]^2} |v|^-alpha
    //   = 8/(2 - alpha) int_0^{pi/4} cos^(alpha-2)(phi) dphi.
    const int steps = 2000;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double phi = (kPi / 4.0) * i / steps;
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * std::pow(std::cos(phi), alpha - 2.0);
    }
    const double singular = 8.0 / (2.0 - alpha) * acc * (kPi / 4.0) / (3.0 * steps);
    const int s = 128;
    double rest = 0.0;
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) {
        const double v1 = -1.0 + (2.0 * a + 1.0) / s;
        const double v2 = -1.0 + (2.0 * b + 1.0) / s;
        const double t = (1.0 - std::abs(v1)) * (1.0 - std::abs(v2)) - 1.0;
        rest += t * std::pow(std::hypot(v1, v2), -alpha);
      }
    return singular + rest * (4.0 / (s * s));
  }
  const int s = far <= 2 ? 32 : 4;
  double acc = 0.0;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      const double v1 = -1.0 + (2.0 * a + 1.0) / s;
      const double v2 = -1.0 + (2.0 * b + 1.0) / s;
      const double t = (1.0 - std::abs(v1)) * (1.0 - std::abs(v2));
      acc += t * std::pow(std::hypot(static_cast<double>(kx) + v1, static_cast<double>(ky) + v2), -alpha);
    }
  return acc * (4.0 / (s * s));
}

struct Raster2 {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> mass;  // row-major, index ix * ny + iy
};

Raster2 rasterize_phi2(std::span<const Point2> points, std::span<const double> weights, double r,
                       std::size_t cap) {
  double minx = std::numeric_limits<double>::infinity(), maxx = -minx;
  double miny = minx, maxy = -minx;
  for (const Point2& p : points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  Raster2 g;
  double h = r / 8.0;
  const double wx = maxx - minx + 2.0 * r + 2.0 * h;
  const double wy = maxy - miny + 2.0 * r + 2.0 * h;
  if (std::max(wx, wy) / h + 1.0 > static_cast<double>(cap)) h = std::max(wx, wy) / static_cast<double>(cap - 2);
  g.h = h;
  g.x0 = minx - r - h;
  g.y0 = miny - r - h;
  g.nx = static_cast<std::size_t>(std::ceil((maxx - minx + 2.0 * r + 2.0 * h) / h)) + 1;
  g.ny = static_cast<std::size_t>(std::ceil((maxy - miny + 2.0 * r + 2.0 * h) / h)) + 1;
  g.mass.assign(g.nx * g.ny, 0.0);
  const int sub = 4;
  std::vector<std::pair<std::size_t, double>> local;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double w = weights[p];
    if (w == 0.0) continue;
    const Point2 c = points[p];
    const auto ix_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((c.x - r - g.x0) / h)));
    const auto ix_hi = std::min<std::int64_t>(static_cast<std::int64_t>(g.nx) - 1,
                                              static_cast<std::int64_t>(std::floor((c.x + r - g.x0) / h)));
    const auto iy_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((c.y - r - g.y0) / h)));
    const auto iy_hi = std::min<std::int64_t>(static_cast<std::int64_t>(g.ny) - 1,
                                              static_cast<std::int64_t>(std::floor((c.y + r - g.y0) / h)));
    local.clear();
    double total = 0.0;
    for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix)
      for (std::int64_t iy = iy_lo; iy <= iy_hi; ++iy) {
        double acc = 0.0;
        for (int a = 0; a < sub; ++a)
          for (int b = 0; b < sub; ++b) {
            const double x = g.x0 + (static_cast<double>(ix) + (a + 0.5) / sub) * h;
            const double y = g.y0 + (static_cast<double>(iy) + (b + 0.5) / sub) * h;
            acc += bump_phi_2d((x - c.x) / r, (y - c.y) / r);
          }
        if (acc > 0.0) {
          local.emplace_back(static_cast<std::size_t>(ix) * g.ny + static_cast<std::size_t>(iy), acc);
          total += acc;
        }
      }
    if (total > 0.0) {
      for (const auto& [idx, v] : local) g.mass[idx] += w * v / total;
    } else {
      const auto ix = static_cast<std::size_t>(std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((c.x - g.x0) / h)), 0, static_cast<std::int64_t>(g.nx) - 1));
      const auto iy = static_cast<std::size_t>(std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((c.y - g.y0) / h)), 0, static_cast<std::int64_t>(g.ny) - 1));
      g.mass[ix * g.ny + iy] += w;
    }
  }
  return g;
}

// Mean of (1 + |xi|)^exponent over a frequency cell; the weight has a cusp
// at 0 that a coarse grid would otherwise sample at its peak.
double cell_weight_1d(double xi, double dxi, double exponent) {
  if (std::abs(xi) > 8.0 * dxi) return std::pow(1.0 + std::abs(xi), exponent);
  const int sub = 32;
  double acc = 0.0;
  for (int i = 0; i < sub; ++i) {
    const double u = xi + dxi * ((i + 0.5) / sub - 0.5);
    acc += std::pow(1.0 + std::abs(u), exponent);
  }
  return acc / sub;
}

double cell_weight_2d(double xi, double eta, double dx, double dy, double exponent) {
  if (std::abs(xi) > 4.0 * dx || std::abs(eta) > 4.0 * dy) return std::pow(1.0 + std::hypot(xi, eta), exponent);
  const int sub = 16;
  double acc = 0.0;
  for (int i = 0; i < sub; ++i)
    for (int j = 0; j < sub; ++j) {
      const double u = xi + dx * ((i + 0.5) / sub - 0.5);
      const double v = eta + dy * ((j + 0.5) / sub - 0.5);
      acc += std::pow(1.0 + std::hypot(u, v), exponent);
    }
  return acc / (sub * sub);
}

// Weighted frequency integral sum |D_k|^2 (1 + |xi_k|)^exponent dxi of a padded 1-D raster.
double spectral_integral_1d(const std::vector<double>& cells, double h, double exponent,
                            double cell_factor) {
  const std::size_t p = next_pow2(4 * cells.size());
  std::vector<double> padded(p, 0.0);
  std::copy(cells.begin(), cells.end(), padded.begin());
  const auto d = fft::forward_real(padded);
  const double dxi = 1.0 / (static_cast<double>(p) * h);
  double acc = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double xi = signed_freq(k, p) * dxi;
    acc += std::norm(d[k] * cell_factor) * cell_weight_1d(xi, dxi, exponent);
  }
  return acc * dxi;
}

}  // namespace

PlanarPointSet::PlanarPointSet(std::vector<Point2> points, double sep, bool separated)
    : points_(std::move(points)), sep_(sep), separated_(separated) {
  if (!(sep >= 0.0) || !std::isfinite(sep)) throw InvalidInput("planar set: sep must be >= 0");
  for (const Point2& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || std::abs(p.x) > 1.0 + 1e-12 ||
        std::abs(p.y) > 1.0 + 1e-12)
      throw InvalidInput("planar set: coordinates must lie in [-1, 1]");
  }
  if (separated_ && !(min_pairwise_distance(points_) > sep_))
    throw InvalidInput("planar set: points are not sep-separated");
}

double min_pairwise_distance(std::span<const Point2> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
  return best;
}

DirectionMeasure::DirectionMeasure(std::vector<DirectionAtom> atoms) : atoms_(std::move(atoms)) {
  double total = 0.0;
  for (DirectionAtom& a : atoms_) {
    if (!std::isfinite(a.theta)) throw InvalidInput("direction measure: angle must be finite");
    if (!(a.weight >= 0.0)) throw InvalidInput("direction measure: weights must be >= 0");
    a.theta = reduce_angle(a.theta);
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("direction measure: weights must sum to 1");
}

DirectionMeasure DirectionMeasure::uniform(std::span<const double> thetas) {
  if (thetas.empty()) throw InvalidInput("direction measure: no directions");
  std::vector<DirectionAtom> atoms;
  const double w = 1.0 / static_cast<double>(thetas.size());
  for (const double t : thetas) atoms.push_back({t, w});
  // Re-spread rounding so the weights sum to 1 within tolerance.
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  atoms.back().weight += 1.0 - total;
  return DirectionMeasure(std::move(atoms));
}

DirectionMeasure DirectionMeasure::from_vectors(double x, std::span<const double> ys) {
  std::vector<double> thetas;
  for (const double y : ys) {
    if (x == 0.0 && y == 0.0) throw InvalidInput("direction measure: zero vector");
    thetas.push_back(std::atan2(y, x));
  }
  return uniform(thetas);
}

std::vector<Atom1> atoms_from_grid(const GridMeasure& mu) {
  std::vector<Atom1> out;
  const double q = static_cast<double>(mu.q());
  for (std::int64_t j = 0; j < mu.q(); ++j)
    if (mu.weight(j) > 0.0) out.push_back({static_cast<double>(j) / q, mu.weight(j)});
  return out;
}

std::vector<Atom1> uniform_atoms(std::span<const double> xs) {
  std::vector<Atom1> out;
  const double w = xs.empty() ? 0.0 : 1.0 / static_cast<double>(xs.size());
  for (const double x : xs) out.push_back({x, w});
  return out;
}

double bump_phi_1d(double u) {
  const double v = 1.0 - u * u;
  return v > 0.0 ? (315.0 / 256.0) * std::pow(v, 4) : 0.0;
}

double marginal_psi(double u) {
  const double v = 1.0 - u * u;
  return v > 0.0 ? (5.0 / kPi) * (256.0 / 315.0) * std::pow(v, 4.5) : 0.0;
}

double bump_phi_2d(double x, double y) {
  const double v = 1.0 - x * x - y * y;
  return v > 0.0 ? (5.0 / kPi) * std::pow(v, 4) : 0.0;
}

double fejer_value(std::int64_t n, double u) {
  if (n < 1) throw InvalidInput("fejer: n must be >= 1");
  const double s = std::sin(kPi * u);
  const auto nd = static_cast<double>(n);
  if (std::abs(s) < 1e-12) return nd;
  const double ratio = std::sin(kPi * nd * u) / s;
  return ratio * ratio / nd;
}

KernelProfile build_kernel(KernelKind kind, double scale_r, std::int64_t grid_q, std::int64_t fejer_n) {
  if (grid_q < 2) throw InvalidInput("kernel: grid_q must be >= 2");
  KernelProfile k;
  k.kind = kind;
  k.grid_q = grid_q;
  const auto qd = static_cast<double>(grid_q);
  if (kind == KernelKind::kFejer) {
    if (fejer_n < 1) throw InvalidInput("kernel: fejer n must be >= 1");
    scale_r = 1.0 / static_cast<double>(fejer_n);
    k.fejer_n = fejer_n;
  }
  if (!(scale_r > 0.0 && scale_r < 1.0)) throw InvalidInput("kernel: scale_r must lie in (0, 1)");
  if (qd * scale_r < 16.0) throw InvalidInput("kernel: grid too coarse for scale, need Q r >= 16");
  k.scale_r = scale_r;

  if (kind == KernelKind::kWindowBump) {
    WindowBump w = build_window_bump(1.0 / scale_r, grid_q);
    k.samples = std::move(w.samples);
    k.spectrum = std::move(w.spectrum);
    return k;
  }

  k.samples.assign(static_cast<std::size_t>(grid_q), 0.0);
  if (kind == KernelKind::kFejer) {
    for (std::int64_t x = 0; x < grid_q; ++x)
      k.samples[static_cast<std::size_t>(x)] = fejer_value(fejer_n, static_cast<double>(x) / qd);
  } else {
    const auto reach = static_cast<std::int64_t>(std::ceil(scale_r * qd));
    for (std::int64_t x = -reach; x <= reach; ++x) {
      const double u = static_cast<double>(x) / qd / scale_r;
      const double v = kind == KernelKind::kBumpPhi ? bump_phi_1d(u) : marginal_psi(u);
      const std::int64_t idx = ((x % grid_q) + grid_q) % grid_q;
      k.samples[static_cast<std::size_t>(idx)] += v / scale_r;
    }
    const double total = std::accumulate(k.samples.begin(), k.samples.end(), 0.0);
    for (double& v : k.samples) v *= qd / total;
  }
  const auto d = fft::forward_real(k.samples);
  k.spectrum.resize(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    k.spectrum[j] = d[j].real() / qd;
    k.max_abs_imag = std::max(k.max_abs_imag, std::abs(d[j].imag()) / qd);
  }
  return k;
}

EnergyReport alpha_energy(std::span<const Atom1> atoms, double alpha, double smooth_r) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha_energy: need 0 < alpha < 1 for d = 1");
  if (!(smooth_r > 0.0)) throw InvalidInput("alpha_energy: smooth_r must be positive");
  if (atoms.empty()) throw InvalidInput("alpha_energy: empty measure");
  EnergyReport rep;
  rep.alpha = alpha;
  rep.dim = 1;
  rep.smooth_r = smooth_r;
  rep.riesz_constant = riesz_constant(alpha, 1.0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Atom1& a : atoms) {
    lo = std::min(lo, a.x);
    hi = std::max(hi, a.x);
  }
  const double r = smooth_r;
  double h = r / 32.0;
  const Grid1 g = make_grid1(lo - r - h, hi + r + h, h, std::size_t{1} << 16);
  h = g.h;
  std::vector<double> mass(g.n, 0.0);
  for (const Atom1& a : atoms) {
    const auto i_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((a.x - r - g.x0) / h)));
    const auto i_hi = std::min<std::int64_t>(static_cast<std::int64_t>(g.n) - 1,
                                             static_cast<std::int64_t>(std::floor((a.x + r - g.x0) / h)));
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      const double left = g.x0 + static_cast<double>(i) * h;
      mass[static_cast<std::size_t>(i)] += a.w * (bump_cdf((left + h - a.x) / r) - bump_cdf((left - a.x) / r));
    }
  }
  rep.raster_step = h;
  rep.raster_cells = g.n;

  // Cell-averaged kernel: second difference of G(u) = |u|^(2-alpha) / ((1-alpha)(2-alpha)).
  const double norm = (1.0 - alpha) * (2.0 - alpha);
  auto G = [&](double u) { return std::pow(std::abs(u), 2.0 - alpha) / norm; };
  const std::size_t p = next_pow2(2 * g.n);
  std::vector<double> kern(p, 0.0);
  for (std::size_t k = 0; k < g.n; ++k) {
    const double kd = static_cast<double>(k);
    const double v = (G((kd + 1.0) * h) - 2.0 * G(kd * h) + G((kd - 1.0) * h)) / (h * h);
    kern[k] = v;
    if (k > 0) kern[p - k] = v;
  }
  std::vector<double> padded(p, 0.0);
  std::copy(mass.begin(), mass.end(), padded.begin());
  const auto conv = fft::circular_convolve(padded, kern);
  double e = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) e += mass[i] * conv[i];
  rep.spatial = e;
  rep.spectral = spectral_integral_1d(mass, h, alpha - 1.0, 1.0);
  rep.ratio = rep.spatial / rep.spectral;
  rep.calibrated_ratio = rep.ratio / rep.riesz_constant;
  return rep;
}

EnergyReport alpha_energy_2d(std::span<const Point2> points, std::span<const double> weights,
                             double alpha, double smooth_r) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidInput("alpha_energy: need 0 < alpha < 2 for d = 2");
  if (!(smooth_r > 0.0)) throw InvalidInput("alpha_energy: smooth_r must be positive");
  if (points.empty() || points.size() != weights.size())
    throw InvalidInput("alpha_energy: points and weights must be nonempty and of equal length");
  EnergyReport rep;
  rep.alpha = alpha;
  rep.dim = 2;
  rep.smooth_r = smooth_r;
  rep.riesz_constant = riesz_constant(alpha, 2.0);
  const Raster2 g = rasterize_phi2(points, weights, smooth_r, 512);
  rep.raster_step = g.h;
  rep.raster_cells = g.nx * g.ny;

  const std::size_t px = next_pow2(2 * g.nx);
  const std::size_t py = next_pow2(2 * g.ny);
  std::vector<double> padded(px * py, 0.0);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) padded[i * py + j] = g.mass[i * g.ny + j];

  const double scale = std::pow(g.h, -alpha);
  std::vector<double> kern(px * py, 0.0);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double v = scale * cell_kernel_2d(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), alpha);
      const std::size_t xs[2] = {i, i == 0 ? 0 : px - i};
      const std::size_t ys[2] = {j, j == 0 ? 0 : py - j};
      for (const std::size_t a : xs)
        for (const std::size_t b : ys) kern[a * py + b] = v;
    }
  const auto fm = fft::forward_real_2d(padded, px, py);
  const auto fk = fft::forward_real_2d(kern, px, py);
  std::vector<fft::cplx> prod(fm.size());
  for (std::size_t i = 0; i < fm.size(); ++i) prod[i] = fm[i] * fk[i];
  const auto conv = fft::inverse_2d(prod, px, py);
  const double inv = 1.0 / static_cast<double>(px * py);
  double e = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) e += g.mass[i * g.ny + j] * conv[i * py + j].real() * inv;
  rep.spatial = e;

  const double dx = 1.0 / (static_cast<double>(px) * g.h);
  const double dy = 1.0 / (static_cast<double>(py) * g.h);
  double s = 0.0;
  for (std::size_t i = 0; i < px; ++i) {
    const double xi = signed_freq(i, px) * dx;
    for (std::size_t j = 0; j < py; ++j) {
      const double yj = signed_freq(j, py) * dy;
      s += std::norm(fm[i * py + j]) * cell_weight_2d(xi, yj, dx, dy, alpha - 2.0);
    }
  }
  rep.spectral = s * dx * dy;
  rep.ratio = rep.spatial / rep.spectral;
  rep.calibrated_ratio = rep.ratio / rep.riesz_constant;
  return rep;
}

EnergyReport alpha_energy(const PlanarPointSet& e, double alpha, double smooth_r) {
  if (e.size() == 0) throw InvalidInput("alpha_energy: empty planar set");
  std::vector<double> w(e.size(), 1.0 / static_cast<double>(e.size()));
  return alpha_energy_2d(e.points(), w, alpha, smooth_r);
}

std::vector<double> project(std::span<const Point2> points, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<double> out;
  out.reserve(points.size());
  for (const Point2& p : points) out.push_back(p.x * c + p.y * s);
  return out;
}

std::vector<double> project(const PlanarPointSet& e, double theta) { return project(e.points(), theta); }

double direction_nbhd_mass(const DirectionMeasure& eta, double ybar, double rho) {
  if (!(rho > 0.0)) throw InvalidInput("direction neighbourhood: rho must be positive");
  double m = 0.0;
  for (const DirectionAtom& a : eta.atoms())
    if (std::abs(std::cos(a.theta - ybar)) < rho) m += a.weight;
  return m;
}

DensityNorm projected_density_norm(std::span<const Atom1> atoms, double r) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("density norm: r must lie in (0, 1)");
  if (atoms.empty()) throw InvalidInput("density norm: empty measure");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, total = 0.0;
  for (const Atom1& a : atoms) {
    lo = std::min(lo, a.x);
    hi = std::max(hi, a.x);
    total += a.w;
  }
  const Grid1 g = make_grid1(lo - 2.0 * r, hi + 2.0 * r, r / 32.0, std::size_t{1} << 20);
  const auto phi = psi_density(atoms, r, g);
  DensityNorm out;
  for (const double v : phi) out.l2sq += v * v * g.h;
  out.cover_lower_bound = total * total / (4.0 * r * out.l2sq);
  return out;
}

DensityNorm projected_density_norm(const PlanarPointSet& e, double theta, double r) {
  const auto xs = project(e, theta);
  const auto atoms = uniform_atoms(xs);
  return projected_density_norm(atoms, r);
}

double subset_cover_lower_bound(std::span<const Atom1> atoms, const std::vector<bool>& mask, double r) {
  if (mask.size() != atoms.size()) throw InvalidInput("density norm: mask length mismatch");
  const DensityNorm dn = projected_density_norm(atoms, r);
  double m = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (mask[i]) m += atoms[i].w;
  return m * m / (4.0 * r * dn.l2sq);
}

DirectionRegularity direction_regularity(const DirectionMeasure& eta, double beta, double r) {
  if (!(beta > 0.0)) throw InvalidInput("direction regularity: beta must be positive");
  if (!(r > 0.0)) throw InvalidInput("direction regularity: r must be positive");
  DirectionRegularity out;
  std::vector<double> radii;
  for (double eps = 2.0 * r; eps < kPi / 2.0; eps *= 2.0) radii.push_back(eps);
  radii.push_back(kPi / 2.0);
  for (const DirectionAtom& c : eta.atoms()) {
    for (const double eps : radii) {
      double m = 0.0;
      for (const DirectionAtom& a : eta.atoms())
        if (angle_distance(a.theta, c.theta) < eps) m += a.weight;
      const double ratio = m / std::pow(eps, beta);
      if (ratio > out.c_eta) {
        out.c_eta = ratio;
        out.worst_theta = c.theta;
        out.worst_eps = eps;
      }
    }
  }
  return out;
}

DirectionalEnergyCheck directional_energy_check(std::span<const Point2> points,
                                                std::span<const double> weights,
                                                const DirectionMeasure& eta, double alpha,
                                                double beta, double beta_prime, double r,
                                                std::optional<double> c_eta_cap,
                                                std::optional<double> c_add) {
  if (!(beta_prime < beta)) throw InvalidInput("directional energy: need beta' < beta");
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("directional energy: r must lie in (0, 1)");
  DirectionalEnergyCheck out;
  const DirectionRegularity reg = direction_regularity(eta, beta, r);
  out.c_eta = reg.c_eta;
  out.worst_theta = reg.worst_theta;
  out.worst_eps = reg.worst_eps;
  if (c_eta_cap && reg.c_eta > *c_eta_cap)
    throw InvalidInput("directional energy: eta regularity violated at theta = " +
                       std::to_string(reg.worst_theta) + ", eps = " + std::to_string(reg.worst_eps) +
                       " (c_eta = " + std::to_string(reg.c_eta) + ")");

  const EnergyReport planar = alpha_energy_2d(points, weights, alpha, r);
  out.planar_integral = planar.spectral;
  out.c_add = c_add.value_or(2.0 * std::pow(kPi / 2.0, beta));

  double lhs = 0.0;
  for (const DirectionAtom& d : eta.atoms()) {
    if (d.weight == 0.0) continue;
    const auto z = project(points, d.theta);
    std::vector<Atom1> atoms;
    for (std::size_t i = 0; i < z.size(); ++i) atoms.push_back({z[i], weights[i]});
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const Grid1 g = make_grid1(*lo - 2.0 * r, *hi + 2.0 * r, r / 32.0, std::size_t{1} << 18);
    const auto phi = psi_density(atoms, r, g);
    lhs += d.weight * spectral_integral_1d(phi, g.h, beta_prime + alpha - 2.0, g.h);
  }
  out.lhs = lhs;
  out.rhs = out.c_eta * (out.c_d * out.planar_integral + out.c_add);
  out.holds = out.lhs <= out.rhs;
  out.fitted_c_add = out.c_eta > 0.0 ? std::max(0.0, out.lhs / out.c_eta - out.c_d * out.planar_integral) : 0.0;
  return out;
}

ProjectionProbe projection_probe(const PlanarPointSet& e, const DirectionMeasure& eta, double r,
                                 double alpha, double alpha_delta, double eps0, double kappa,
                                 double tau0) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("projection probe: r must lie in (0, 1)");
  ProjectionProbe out;
  out.threshold = std::pow(r, -(alpha + alpha_delta) / 2.0);
  out.predicted_min_mass = 1.0 - std::pow(r, eps0);
  const auto pts = e.points();
  const auto n = static_cast<double>(pts.size());

  out.size_ok = n > std::pow(r, -alpha);
  out.separated_ok = min_pairwise_distance(pts) > r;

  std::vector<double> scales;
  for (double rho = 2.0 * r; rho < std::pow(r, tau0); rho *= 2.0) scales.push_back(rho);

  out.concentration_ok = true;
  for (const double rho : scales) {
    std::size_t worst = 0;
    for (const Point2& c : pts) {
      std::size_t cnt = 0;
      for (const Point2& p : pts)
        if (std::hypot(p.x - c.x, p.y - c.y) < rho) ++cnt;
      worst = std::max(worst, cnt);
    }
    if (!(static_cast<double>(worst) < std::pow(rho, kappa) * n)) out.concentration_ok = false;
  }

  // eta(V(y, rho)) is the mass of an open arc of half-width asin(rho) centred
  // orthogonally to y; the sup over y is a sliding window over sorted angles.
  std::vector<DirectionAtom> sorted(eta.atoms().begin(), eta.atoms().end());
  std::sort(sorted.begin(), sorted.end(),
            [](const DirectionAtom& a, const DirectionAtom& b) { return a.theta < b.theta; });
  out.direction_ok = true;
  for (const double rho : scales) {
    const double width = 2.0 * std::asin(std::min(rho, 1.0));
    double worst = 0.0;
    const std::size_t m = sorted.size();
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = (i + j) % m;
        const double gap = sorted[k].theta - sorted[i].theta + (k < i ? kPi : 0.0);
        if (gap < width) acc += sorted[k].weight;
      }
      worst = std::max(worst, acc);
    }
    if (!(worst < std::pow(rho, kappa))) out.direction_ok = false;
  }

  if (!out.size_ok) out.decline_reason = "|E| <= r^-alpha";
  else if (!out.separated_ok) out.decline_reason = "E is not r-separated";
  else if (!out.concentration_ok) out.decline_reason = "E concentrates in a ball";
  else if (!out.direction_ok) out.decline_reason = "eta concentrates near a direction";
  out.declined = !out.decline_reason.empty();
  if (out.declined) return out;

  for (const DirectionAtom& d : eta.atoms()) {
    ProbeDirection pd;
    pd.theta = d.theta;
    pd.weight = d.weight;
    pd.cover = covering_number_real(project(e, d.theta), r).count;
    pd.achieves = static_cast<double>(pd.cover) > out.threshold;
    if (pd.achieves) out.achieving_mass += d.weight;
    out.directions.push_back(pd);
  }
  out.exceptional_mass = 1.0 - out.achieving_mass;
  return out;
}

}  // namespace torusdec
