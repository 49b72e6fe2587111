// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "rejsamp/normal.hpp"

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Plain-double siblings of the Dual primitives so the generic bodies below
// instantiate for both scalar types.
double log1p(double v) { return std::log1p(v); }
double sin(double v) { return std::sin(v); }
double exp(double v) { return std::exp(v); }

template <class S>
S generic_peakiness(double a, const S& x) {
  return -x - a * log1p(x);
}

template <class S>
S generic_sinusoid(const std::vector<S>& x) {
  S total = 0.0;
  for (const S& xi : x) total += log1p(sin(4.0 * kPi * xi - 0.5 * kPi));
  return total;
}

// log( r phi_d(x - c*1) + (1-r) phi_d(x/100) / 100^d ), summed over centers.
template <class S>
S generic_clutter(double r, const std::vector<double>& centers, const std::vector<S>& x) {
  const double d = static_cast<double>(x.size());
  const double log_r = r > 0.0 ? std::log(r) : -kInf;
  const double log_1mr = r < 1.0 ? std::log1p(-r) : -kInf;

  S broad_q = 0.0;
  for (const S& xi : x) {
    const S z = xi * (1.0 / 100.0);
    broad_q += z * z;
  }
  const S lb = log_1mr - 0.5 * d * kLogTwoPi - 0.5 * broad_q - d * std::log(100.0);

  S total = 0.0;
  for (const double c : centers) {
    S q = 0.0;
    for (const S& xi : x) {
      const S z = xi - c;
      q += z * z;
    }
    const S la = log_r - 0.5 * d * kLogTwoPi - 0.5 * q;
    // Stable log(e^la + e^lb).
    if (la >= lb)
      total += la + log1p(exp(lb - la));
    else
      total += lb + log1p(exp(la - lb));
  }
  return total;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::kPeakiness:
      return "peakiness";
    case Family::kSinusoid:
      return "sinusoid";
    case Family::kClutter:
      return "clutter";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "peakiness") return Family::kPeakiness;
  if (name == "sinusoid") return Family::kSinusoid;
  if (name == "clutter") return Family::kClutter;
  throw std::invalid_argument("unknown target family: " + name);
}

std::string BenchSpec::label() const {
  std::ostringstream os;
  os << family_name(family);
  if (family == Family::kPeakiness) os << "(a=" << a << ")";
  if (family == Family::kSinusoid) os << "(d=" << d << ")";
  if (family == Family::kClutter) os << "(d=" << d << ",r=" << r << ")";
  return os.str();
}

const std::vector<double>& clutter_centers() {
  static const std::vector<double> centers = {-5.0, -4.5, -4.0, -3.5, -3.0,
                                              2.0,  2.5,  3.0,  3.5,  4.0};
  return centers;
}

double peakiness_log(double a, double x) {
  if (x <= 0.0) return -kInf;
  return generic_peakiness(a, x);
}

double sinusoid_log(std::size_t d, const std::vector<double>& x) {
  if (x.size() != d) throw std::invalid_argument("sinusoid dimension mismatch");
  for (double xi : x)
    if (xi < 0.0 || xi > 1.0) return -kInf;
  return generic_sinusoid(x);
}

double clutter_log(double r, const std::vector<double>& centers, const std::vector<double>& x) {
  return generic_clutter(r, centers, x);
}

Domain bench_domain(const BenchSpec& spec) {
  switch (spec.family) {
    case Family::kPeakiness:
      return Domain({0.0}, {kInf});
    case Family::kSinusoid:
      return Domain(std::vector<double>(spec.d, 0.0), std::vector<double>(spec.d, 1.0));
    case Family::kClutter:
      return Domain::unbounded(spec.d);
  }
  throw std::logic_error("unreachable");
}

LogTarget make_target(const BenchSpec& spec) {
  switch (spec.family) {
    case Family::kPeakiness: {
      const double a = spec.a;
      LogTarget t;
      t.domain = bench_domain(spec);
      t.eval = [a](const std::vector<double>& x) { return peakiness_log(a, x[0]); };
      t.eval_dual = [a](const std::vector<Dual>& x) {
        if (x[0].value() <= 0.0) return Dual(-kInf);
        return generic_peakiness(a, x[0]);
      };
      return t;
    }
    case Family::kSinusoid: {
      LogTarget t;
      t.domain = bench_domain(spec);
      t.eval = [d = spec.d](const std::vector<double>& x) { return sinusoid_log(d, x); };
      t.eval_dual = [](const std::vector<Dual>& x) { return generic_sinusoid(x); };
      return t;
    }
    case Family::kClutter: {
      const double r = spec.r;
      LogTarget t;
      t.domain = bench_domain(spec);
      t.eval = [r](const std::vector<double>& x) {
        return generic_clutter(r, clutter_centers(), x);
      };
      t.eval_dual = [r](const std::vector<Dual>& x) {
        return generic_clutter(r, clutter_centers(), x);
      };
      return t;
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Oracle samplers.

namespace {

// Piecewise-linear-density inverse CDF on a grid.
class Grid1D {
 public:
  // logf over a finite working range; adaptive: a uniform pass allocates the
  // remaining points at equal mass increments.
  Grid1D(const std::function<double(double)>& logf, double lo, double hi, bool expand_lo,
         bool expand_hi) {
    constexpr int kCoarse = 1 << 14;
    constexpr int kTotal = 1 << 17;
    constexpr double kDropNats = 46.0;

    // Expand any open side until the density has fallen kDropNats below the
    // running maximum, then trim the range to where mass actually lives.
    double peak = -kInf;
    auto scan_peak = [&](double a, double b) {
      for (int i = 0; i <= 256; ++i) peak = std::max(peak, logf(a + (b - a) * i / 256.0));
    };
    scan_peak(lo, hi);
    const double width0 = hi - lo;
    while (expand_hi && logf(hi) > peak - kDropNats) {
      hi += std::max(width0, hi - lo);
      scan_peak(lo, hi);
    }
    while (expand_lo && logf(lo) > peak - kDropNats) {
      lo -= std::max(width0, hi - lo);
      scan_peak(lo, hi);
    }
    {  // trim dead flanks on the coarse grid
      std::vector<double> cx(kCoarse + 1), cl(kCoarse + 1);
      double cmax = -kInf;
      for (int i = 0; i <= kCoarse; ++i) {
        cx[i] = lo + (hi - lo) * i / kCoarse;
        cl[i] = logf(cx[i]);
        cmax = std::max(cmax, cl[i]);
      }
      int a = 0, b = kCoarse;
      while (a < b && cl[a] < cmax - kDropNats) ++a;
      while (b > a && cl[b] < cmax - kDropNats) --b;
      a = std::max(0, a - 1);
      b = std::min(kCoarse, b + 1);
      // Equal-mass refinement from the coarse CDF.
      std::vector<double> cum(b - a + 1, 0.0);
      for (int i = a + 1; i <= b; ++i) {
        const double w0 = std::exp(cl[i - 1] - cmax);
        const double w1 = std::exp(cl[i] - cmax);
        cum[i - a] = cum[i - a - 1] + 0.5 * (w0 + w1) * (cx[i] - cx[i - 1]);
      }
      const double total = cum.back();
      std::vector<double> pts;
      pts.reserve(kTotal + kCoarse);
      for (int i = a; i <= b; ++i) pts.push_back(cx[i]);
      const int extra = kTotal - static_cast<int>(pts.size());
      int seg = 0;
      for (int e = 0; e < extra; ++e) {
        const double m = total * (e + 0.5) / extra;
        while (seg + 1 < static_cast<int>(cum.size()) - 1 && cum[seg + 1] < m) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double t = span > 0.0 ? (m - cum[seg]) / span : 0.5;
        pts.push_back(cx[a + seg] + t * (cx[a + seg + 1] - cx[a + seg]));
      }
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      x_ = std::move(pts);
    }

    // Final density table and CDF.
    w_.resize(x_.size());
    double wmax = -kInf;
    std::vector<double> lf(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
      lf[i] = logf(x_[i]);
      wmax = std::max(wmax, lf[i]);
    }
    for (std::size_t i = 0; i < x_.size(); ++i) w_[i] = std::exp(lf[i] - wmax);
    cdf_.resize(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (w_[i] + w_[i - 1]) * (x_[i] - x_[i - 1]);
    total_ = cdf_.back();
  }

  double sample(double u) const {
    const double m = u * total_;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), m);
    std::size_t i = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    if (i == 0) i = 1;
    if (i >= cdf_.size()) i = cdf_.size() - 1;
    const double h = x_[i] - x_[i - 1];
    const double seg_mass = cdf_[i] - cdf_[i - 1];
    const double frac = seg_mass > 0.0 ? (m - cdf_[i - 1]) / seg_mass : 0.5;
    // Invert the trapezoid: density linear from w0 to w1 across the cell.
    const double w0 = w_[i - 1], w1 = w_[i];
    double t;
    if (std::abs(w1 - w0) < 1e-12 * (w0 + w1 + 1e-300)) {
      t = frac;
    } else {
      const double aq = 0.5 * (w1 - w0);
      const double disc = w0 * w0 + 2.0 * aq * frac * (w0 + w1);
      t = (-w0 + std::sqrt(std::max(0.0, disc))) / (2.0 * aq);
      t = std::clamp(t, 0.0, 1.0);
    }
    return x_[i - 1] + t * h;
  }

  double total_mass_scaled() const { return total_; }
  const std::vector<double>& knots() const { return x_; }

 private:
  std::vector<double> x_, w_, cdf_;
  double total_ = 0.0;
};

// Direct 2-D inversion: marginal in x1, conditional in x2, both trapezoid.
class Grid2D {
 public:
  Grid2D(const std::function<double(double, double)>& logf, double lo, double hi) {
    constexpr int kCoarse = 256;
    constexpr int kFine = 2048;
    constexpr double kDropNats = 40.0;
    // Coarse bounding box of the region that carries mass.
    double cmax = -kInf;
    std::vector<double> cl((kCoarse + 1) * (kCoarse + 1));
    for (int i = 0; i <= kCoarse; ++i)
      for (int j = 0; j <= kCoarse; ++j) {
        const double x = lo + (hi - lo) * i / kCoarse;
        const double y = lo + (hi - lo) * j / kCoarse;
        cl[i * (kCoarse + 1) + j] = logf(x, y);
        cmax = std::max(cmax, cl[i * (kCoarse + 1) + j]);
      }
    double bxlo = hi, bxhi = lo, bylo = hi, byhi = lo;
    for (int i = 0; i <= kCoarse; ++i)
      for (int j = 0; j <= kCoarse; ++j)
        if (cl[i * (kCoarse + 1) + j] > cmax - kDropNats) {
          const double x = lo + (hi - lo) * i / kCoarse;
          const double y = lo + (hi - lo) * j / kCoarse;
          bxlo = std::min(bxlo, x);
          bxhi = std::max(bxhi, x);
          bylo = std::min(bylo, y);
          byhi = std::max(byhi, y);
        }
    const double margin = 2.0 * (hi - lo) / kCoarse;
    bxlo -= margin;
    bxhi += margin;
    bylo -= margin;
    byhi += margin;

    nx_ = ny_ = kFine;
    x_.resize(nx_);
    y_.resize(ny_);
    for (int i = 0; i < nx_; ++i) x_[i] = bxlo + (bxhi - bxlo) * i / (nx_ - 1);
    for (int j = 0; j < ny_; ++j) y_[j] = bylo + (byhi - bylo) * j / (ny_ - 1);
    dens_.resize(static_cast<std::size_t>(nx_) * ny_);
    double dmax = -kInf;
    std::vector<double> lrow(static_cast<std::size_t>(nx_) * ny_);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) {
        const double v = logf(x_[i], y_[j]);
        lrow[static_cast<std::size_t>(i) * ny_ + j] = v;
        dmax = std::max(dmax, v);
      }
    for (std::size_t k = 0; k < dens_.size(); ++k) dens_[k] = std::exp(lrow[k] - dmax);

    // Marginal mass density along x1 (trapezoid over x2).
    marg_.resize(nx_, 0.0);
    for (int i = 0; i < nx_; ++i) {
      double s = 0.0;
      const double* row = &dens_[static_cast<std::size_t>(i) * ny_];
      for (int j = 1; j < ny_; ++j) s += 0.5 * (row[j] + row[j - 1]) * (y_[j] - y_[j - 1]);
      marg_[i] = s;
    }
    mcdf_.resize(nx_, 0.0);
    for (int i = 1; i < nx_; ++i)
      mcdf_[i] = mcdf_[i - 1] + 0.5 * (marg_[i] + marg_[i - 1]) * (x_[i] - x_[i - 1]);
  }

  void sample(double u1, double u2, double* out) const {
    // x1 from the marginal.
    const double m = u1 * mcdf_.back();
    auto it = std::upper_bound(mcdf_.begin(), mcdf_.end(), m);
    std::size_t i = static_cast<std::size_t>(std::distance(mcdf_.begin(), it));
    if (i == 0) i = 1;
    if (i >= mcdf_.size()) i = mcdf_.size() - 1;
    const double seg = mcdf_[i] - mcdf_[i - 1];
    const double frac = seg > 0.0 ? (m - mcdf_[i - 1]) / seg : 0.5;
    const double t = invert_linear(marg_[i - 1], marg_[i], frac);
    const double x1 = x_[i - 1] + t * (x_[i] - x_[i - 1]);

    // Conditional row at x1 (linear blend of the two neighbouring rows).
    const double* r0 = &dens_[(i - 1) * static_cast<std::size_t>(ny_)];
    const double* r1 = &dens_[i * static_cast<std::size_t>(ny_)];
    std::vector<double> row(ny_);
    for (int j = 0; j < ny_; ++j) row[j] = (1.0 - t) * r0[j] + t * r1[j];
    std::vector<double> cc(ny_, 0.0);
    for (int j = 1; j < ny_; ++j)
      cc[j] = cc[j - 1] + 0.5 * (row[j] + row[j - 1]) * (y_[j] - y_[j - 1]);
    const double m2 = u2 * cc.back();
    auto jt = std::upper_bound(cc.begin(), cc.end(), m2);
    std::size_t j = static_cast<std::size_t>(std::distance(cc.begin(), jt));
    if (j == 0) j = 1;
    if (j >= cc.size()) j = cc.size() - 1;
    const double seg2 = cc[j] - cc[j - 1];
    const double frac2 = seg2 > 0.0 ? (m2 - cc[j - 1]) / seg2 : 0.5;
    const double t2 = invert_linear(row[j - 1], row[j], frac2);
    out[0] = x1;
    out[1] = y_[j - 1] + t2 * (y_[j] - y_[j - 1]);
  }

 private:
  static double invert_linear(double w0, double w1, double frac) {
    if (std::abs(w1 - w0) < 1e-12 * (w0 + w1 + 1e-300)) return frac;
    const double aq = 0.5 * (w1 - w0);
    const double disc = w0 * w0 + 2.0 * aq * frac * (w0 + w1);
    double t = (-w0 + std::sqrt(std::max(0.0, disc))) / (2.0 * aq);
    return std::clamp(t, 0.0, 1.0);
  }

  int nx_ = 0, ny_ = 0;
  std::vector<double> x_, y_, dens_, marg_, mcdf_;
};

std::mutex g_oracle_mutex;

const Grid1D& grid1d_for(const BenchSpec& spec) {
  static std::map<std::string, std::unique_ptr<Grid1D>> cache;
  std::lock_guard<std::mutex> lk(g_oracle_mutex);
  const std::string key = spec.label();
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  std::unique_ptr<Grid1D> grid;
  switch (spec.family) {
    case Family::kPeakiness: {
      const double a = spec.a;
      grid = std::make_unique<Grid1D>(
          [a](double x) { return peakiness_log(a, x); }, 1e-9, 8.0, false, true);
      break;
    }
    case Family::kSinusoid:
      grid = std::make_unique<Grid1D>(
          [](double x) { return x < 0.0 || x > 1.0 ? -kInf : std::log1p(std::sin(4.0 * kPi * x - 0.5 * kPi)); },
          0.0, 1.0, false, false);
      break;
    case Family::kClutter: {
      const double r = spec.r;
      grid = std::make_unique<Grid1D>(
          [r](double x) { return clutter_log(r, clutter_centers(), {x}); }, -20.0, 20.0, true,
          true);
      break;
    }
  }
  return *cache.emplace(key, std::move(grid)).first->second;
}

const Grid2D& grid2d_clutter(const BenchSpec& spec) {
  static std::map<std::string, std::unique_ptr<Grid2D>> cache;
  std::lock_guard<std::mutex> lk(g_oracle_mutex);
  const std::string key = spec.label();
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  const double r = spec.r;
  auto grid = std::make_unique<Grid2D>(
      [r](double x, double y) { return clutter_log(r, clutter_centers(), {x, y}); }, -20.0, 20.0);
  return *cache.emplace(key, std::move(grid)).first->second;
}

}  // namespace

std::vector<double> oracle_sample(const BenchSpec& spec, std::size_t n, Rng& rng) {
  switch (spec.family) {
    case Family::kPeakiness: {
      const Grid1D& g = grid1d_for(spec);
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = g.sample(rng.uniform());
      return out;
    }
    case Family::kSinusoid: {
      if (spec.d < 1 || spec.d > 7)
        throw std::invalid_argument("sinusoid oracle supports 1 <= d <= 7");
      BenchSpec one = spec;
      one.d = 1;
      const Grid1D& g = grid1d_for(one);
      std::vector<double> out(n * spec.d);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < spec.d; ++k) out[i * spec.d + k] = g.sample(rng.uniform());
      return out;
    }
    case Family::kClutter: {
      if (spec.d == 1) {
        const Grid1D& g = grid1d_for(spec);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = g.sample(rng.uniform());
        return out;
      }
      if (spec.d == 2) {
        const Grid2D& g = grid2d_clutter(spec);
        std::vector<double> out(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
          const double u1 = rng.uniform();
          const double u2 = rng.uniform();
          g.sample(u1, u2, out.data() + 2 * i);
        }
        return out;
      }
      throw std::invalid_argument("clutter oracle supports d in {1, 2}");
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace rejsamp
