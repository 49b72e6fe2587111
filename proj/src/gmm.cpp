// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "rejsamp/normal.hpp"
#include "rejsamp/optim.hpp"

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this log-mass the per-dimension truncated density is numerically
// unusable; sampling falls back to the boundary sliver.
constexpr double kDegenerateLogMass = -690.0;  // ~log(1e-300)

double log_sum_exp(const double* v, std::size_t n) {
  double m = -kInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace

GmmProposal::GmmProposal(Domain domain, std::vector<double> means, std::vector<double> log_sigmas,
                         std::vector<double> weight_logits)
    : domain_(std::move(domain)),
      K_(weight_logits.size()),
      d_(domain_.dims()),
      means_(std::move(means)),
      log_sigmas_(std::move(log_sigmas)),
      weight_logits_(std::move(weight_logits)) {
  if (K_ == 0) throw std::invalid_argument("mixture needs at least one component");
  if (means_.size() != K_ * d_ || log_sigmas_.size() != K_ * d_)
    throw std::invalid_argument("mixture parameter shape mismatch");
  for (double v : means_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite mixture mean");
  for (double v : log_sigmas_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite mixture log-sigma");
  for (double v : weight_logits_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite mixture weight logit");
  build_caches();
}

GmmProposal GmmProposal::from_flat(Domain domain, std::size_t K, const std::vector<double>& flat) {
  const std::size_t d = domain.dims();
  if (flat.size() != 2 * K * d + K) throw std::invalid_argument("flat parameter size mismatch");
  std::vector<double> means(flat.begin(), flat.begin() + K * d);
  std::vector<double> ls(flat.begin() + K * d, flat.begin() + 2 * K * d);
  std::vector<double> logits(flat.begin() + 2 * K * d, flat.end());
  return GmmProposal(std::move(domain), std::move(means), std::move(ls), std::move(logits));
}

std::vector<double> GmmProposal::flat_params() const {
  std::vector<double> flat;
  flat.reserve(flat_size());
  flat.insert(flat.end(), means_.begin(), means_.end());
  flat.insert(flat.end(), log_sigmas_.begin(), log_sigmas_.end());
  flat.insert(flat.end(), weight_logits_.begin(), weight_logits_.end());
  return flat;
}

void GmmProposal::build_caches() {
  sigma_.resize(K_ * d_);
  inv_sigma_.resize(K_ * d_);
  logz_.resize(K_ * d_);
  tgrad_mu_.resize(K_ * d_);
  tgrad_ls_.resize(K_ * d_);
  base_.resize(K_);
  w_ = softmax(weight_logits_);
  log_w_.resize(K_);
  for (std::size_t k = 0; k < K_; ++k) log_w_[k] = std::log(w_[k]);

  for (std::size_t k = 0; k < K_; ++k) {
    double base = log_w_[k] - 0.5 * static_cast<double>(d_) * kLogTwoPi;
    for (std::size_t i = 0; i < d_; ++i) {
      const std::size_t j = k * d_ + i;
      sigma_[j] = std::exp(log_sigmas_[j]);
      inv_sigma_[j] = 1.0 / sigma_[j];
      const double a = (domain_.lower(i) - means_[j]) * inv_sigma_[j];
      const double b = (domain_.upper(i) - means_[j]) * inv_sigma_[j];
      const double lz = norm_logmass(a, b);
      logz_[j] = lz;
      base -= log_sigmas_[j] + lz;

      // d(logZ)/d(mu) = (phi(a) - phi(b)) / (sigma Z), via log-space ratios.
      double pa = 0.0, pb = 0.0, ha = 0.0, hb = 0.0;
      if (std::isfinite(a)) {
        pa = std::exp(norm_logpdf(a) - lz);
        ha = a * pa;
      }
      if (std::isfinite(b)) {
        pb = std::exp(norm_logpdf(b) - lz);
        hb = b * pb;
      }
      tgrad_mu_[j] = (pa - pb) * inv_sigma_[j];
      // d(logZ)/d(log sigma) = (a phi(a) - b phi(b)) / Z.
      tgrad_ls_[j] = ha - hb;
    }
    base_[k] = base;
  }
}

double GmmProposal::log_trunc_mass(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < d_; ++i) s += logz_[k * d_ + i];
  return s;
}

double GmmProposal::log_density(const std::vector<double>& x) const {
  if (x.size() != d_) throw std::invalid_argument("point dimension mismatch");
  if (!domain_.contains(x)) return -kInf;
  return log_density(x.data());
}

namespace {
// Scratch for per-component terms; mixtures stay small (K grows with
// log2 |A|), so a fixed stack slab suffices and keeps the density evaluation
// allocation-free on the refinement hot path.
constexpr std::size_t kMaxStackComponents = 64;

thread_local std::vector<double> g_comp_scratch;

inline double* comp_scratch(double* stack, std::size_t K) {
  if (K <= kMaxStackComponents) return stack;
  g_comp_scratch.resize(K);
  return g_comp_scratch.data();
}
}  // namespace

double GmmProposal::log_density(const double* x) const {
  for (std::size_t i = 0; i < d_; ++i)
    if (x[i] < domain_.lower(i) || x[i] > domain_.upper(i)) return -kInf;
  double m = -kInf;
  double stack[kMaxStackComponents];
  double* t = comp_scratch(stack, K_);
  for (std::size_t k = 0; k < K_; ++k) {
    double q = 0.0;
    const double* mu = &means_[k * d_];
    const double* is = &inv_sigma_[k * d_];
    for (std::size_t i = 0; i < d_; ++i) {
      const double z = (x[i] - mu[i]) * is[i];
      q += z * z;
    }
    t[k] = base_[k] - 0.5 * q;
    m = std::max(m, t[k]);
  }
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t k = 0; k < K_; ++k) s += std::exp(t[k] - m);
  return m + std::log(s);
}

double GmmProposal::log_density_accum_grad(const double* x, double coeff,
                                           double* grad_accum) const {
  for (std::size_t i = 0; i < d_; ++i)
    if (x[i] < domain_.lower(i) || x[i] > domain_.upper(i)) return -kInf;
  // Component log-densities first (shared with the plain evaluation).
  double stack[kMaxStackComponents];
  double* lk = comp_scratch(stack, K_);
  double m = -kInf;
  for (std::size_t k = 0; k < K_; ++k) {
    double q = 0.0;
    const double* mu = &means_[k * d_];
    const double* is = &inv_sigma_[k * d_];
    for (std::size_t i = 0; i < d_; ++i) {
      const double z = (x[i] - mu[i]) * is[i];
      q += z * z;
    }
    lk[k] = base_[k] - 0.5 * q;
    m = std::max(m, lk[k]);
  }
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t k = 0; k < K_; ++k) {
    lk[k] = std::exp(lk[k] - m);  // reused below as the responsibility numerator
    s += lk[k];
  }
  const double logg = m + std::log(s);
  if (grad_accum == nullptr) return logg;

  const double inv_s = 1.0 / s;
  const std::size_t off_ls = K_ * d_;
  const std::size_t off_logit = 2 * K_ * d_;
  for (std::size_t k = 0; k < K_; ++k) {
    const double r = lk[k] * inv_s;  // responsibility
    grad_accum[off_logit + k] += coeff * (r - w_[k]);
    if (r == 0.0) continue;
    const double* mu = &means_[k * d_];
    const double* is = &inv_sigma_[k * d_];
    for (std::size_t i = 0; i < d_; ++i) {
      const std::size_t j = k * d_ + i;
      const double z = (x[i] - mu[i]) * is[i];
      grad_accum[j] += coeff * r * (z * is[i] - tgrad_mu_[j]);
      grad_accum[off_ls + j] += coeff * r * (z * z - 1.0 - tgrad_ls_[j]);
    }
  }
  return logg;
}

std::vector<double> GmmProposal::param_grad(const std::vector<double>& x) const {
  if (x.size() != d_) throw std::invalid_argument("point dimension mismatch");
  std::vector<double> grad(flat_size(), 0.0);
  log_density_accum_grad(x.data(), 1.0, grad.data());
  return grad;
}

void GmmProposal::sample_into(Rng& rng, std::size_t m, double* out,
                              std::int64_t* degenerate_warnings) const {
  for (std::size_t s = 0; s < m; ++s) {
    // Component choice from one uniform over the cumulative weights.
    const double uc = rng.uniform();
    std::size_t k = 0;
    double acc = 0.0;
    for (; k + 1 < K_; ++k) {
      acc += w_[k];
      if (uc <= acc) break;
    }
    double* row = out + s * d_;
    for (std::size_t i = 0; i < d_; ++i) {
      const std::size_t j = k * d_ + i;
      const double u = rng.uniform();
      const double lo = domain_.lower(i);
      const double hi = domain_.upper(i);
      double xi;
      if (logz_[j] > kDegenerateLogMass) {
        const double a = (lo - means_[j]) * inv_sigma_[j];
        const double b = (hi - means_[j]) * inv_sigma_[j];
        xi = means_[j] + sigma_[j] * truncnorm_standard_draw(a, b, u);
      } else {
        // Truncation mass underflowed: draw from a sliver just inside the
        // bound nearest to the component mean.
        if (degenerate_warnings) ++(*degenerate_warnings);
        const bool near_lower =
            std::isfinite(lo) &&
            (!std::isfinite(hi) || std::abs(means_[j] - lo) <= std::abs(means_[j] - hi));
        const double anchor = near_lower ? lo : hi;
        const double width =
            1e-13 * ((std::isfinite(lo) && std::isfinite(hi)) ? (hi - lo)
                                                              : std::max(1.0, std::abs(anchor)));
        xi = near_lower ? lo + u * width : hi - u * width;
      }
      if (std::isfinite(lo) && xi <= lo) xi = std::nextafter(lo, hi);
      if (std::isfinite(hi) && xi >= hi) xi = std::nextafter(hi, lo);
      row[i] = xi;
    }
  }
}

std::vector<double> GmmProposal::sample(Rng& rng, std::size_t m,
                                        std::int64_t* degenerate_warnings) const {
  std::vector<double> out(m * d_);
  sample_into(rng, m, out.data(), degenerate_warnings);
  return out;
}

std::string GmmProposal::to_json() const {
  nlohmann::json j;
  auto matrix = [&](const std::vector<double>& v) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < K_; ++k) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t i = 0; i < d_; ++i) row.push_back(v[k * d_ + i]);
      rows.push_back(row);
    }
    return rows;
  };
  j["means"] = matrix(means_);
  j["sigmas"] = matrix(sigma_);
  j["weights"] = w_;
  nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
  for (std::size_t i = 0; i < d_; ++i) {
    if (std::isinf(domain_.lower(i)))
      lo.push_back(nullptr);
    else
      lo.push_back(domain_.lower(i));
    if (std::isinf(domain_.upper(i)))
      hi.push_back(nullptr);
    else
      hi.push_back(domain_.upper(i));
  }
  j["domain"] = {{"lower", lo}, {"upper", hi}};
  return j.dump();
}

GmmProposal GmmProposal::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto& jm = j.at("means");
  const std::size_t K = jm.size();
  const std::size_t d = jm.at(0).size();
  std::vector<double> means(K * d), ls(K * d), logits(K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      means[k * d + i] = jm.at(k).at(i).get<double>();
      ls[k * d + i] = std::log(j.at("sigmas").at(k).at(i).get<double>());
    }
  for (std::size_t k = 0; k < K; ++k) logits[k] = std::log(j.at("weights").at(k).get<double>());
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& jl = j.at("domain").at("lower").at(i);
    const auto& jh = j.at("domain").at("upper").at(i);
    lo[i] = jl.is_null() ? -kInf : jl.get<double>();
    hi[i] = jh.is_null() ? kInf : jh.get<double>();
  }
  return GmmProposal(Domain(lo, hi), std::move(means), std::move(ls), std::move(logits));
}

// ---------------------------------------------------------------------------
// Weighted EM with k-means++ seeding.

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::size_t weighted_pick(const std::vector<double>& w, double total, Rng& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u <= acc && w[i] > 0.0) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0.0) return i;
  return 0;
}

std::vector<std::size_t> kmeanspp_seeds(const double* data, const double* weights, std::size_t n,
                                        std::size_t d, std::size_t K, Rng& rng) {
  std::vector<std::size_t> seeds;
  seeds.reserve(K);
  std::vector<double> w0(weights, weights + n);
  double total = 0.0;
  for (double w : w0) total += w;
  seeds.push_back(weighted_pick(w0, total, rng));

  std::vector<double> d2(n, kInf);
  std::vector<double> prob(n, 0.0);
  while (seeds.size() < K) {
    const double* c = data + seeds.back() * d;
    double ptotal = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(data + i * d, c, d));
      prob[i] = weights[i] * d2[i];
      ptotal += prob[i];
    }
    if (ptotal <= 0.0) {
      // All remaining mass sits on the chosen seeds; reuse the heaviest point.
      seeds.push_back(weighted_pick(w0, total, rng));
      continue;
    }
    seeds.push_back(weighted_pick(prob, ptotal, rng));
  }
  return seeds;
}

}  // namespace

GmmProposal gmm_fit_em(const Domain& domain, const double* data, const double* weights,
                       std::size_t n, std::size_t d, const EmOptions& opts, Rng& rng,
                       std::vector<double>* ll_history) {
  const std::size_t K = opts.K;
  if (K == 0) throw std::invalid_argument("EM requires K >= 1");
  if (n < K) throw std::invalid_argument("EM requires n >= K");
  double weight_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("EM weights must be nonnegative");
    weight_total += weights[i];
  }
  if (weight_total <= 0.0) throw std::invalid_argument("EM requires positive total weight");

  std::vector<double> sigma_floor(d);
  for (std::size_t i = 0; i < d; ++i) {
    const bool finite = std::isfinite(domain.lower(i)) && std::isfinite(domain.upper(i));
    sigma_floor[i] = opts.variance_floor_scale * (finite ? domain.upper(i) - domain.lower(i) : 1.0);
  }

  // Seeding: k-means++ with the data weights, then moments of the induced
  // nearest-seed partition.
  const std::vector<std::size_t> seeds = kmeanspp_seeds(data, weights, n, d, K, rng);
  std::vector<double> mu(K * d), var(K * d, 0.0), wsum(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < d; ++i) mu[k * d + i] = data[seeds[k] * d + i];
  {
    std::vector<double> acc(K * d, 0.0);
    std::vector<std::size_t> owner(n);
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t best = 0;
      double bestd = kInf;
      for (std::size_t k = 0; k < K; ++k) {
        const double dd = sq_dist(data + p * d, &mu[k * d], d);
        if (dd < bestd) {
          bestd = dd;
          best = k;
        }
      }
      owner[p] = best;
      wsum[best] += weights[p];
      for (std::size_t i = 0; i < d; ++i) acc[best * d + i] += weights[p] * data[p * d + i];
    }
    for (std::size_t k = 0; k < K; ++k)
      if (wsum[k] > 0.0)
        for (std::size_t i = 0; i < d; ++i) mu[k * d + i] = acc[k * d + i] / wsum[k];
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t k = owner[p];
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = data[p * d + i] - mu[k * d + i];
        var[k * d + i] += weights[p] * diff * diff;
      }
    }
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < d; ++i) {
        double v = wsum[k] > 0.0 ? var[k * d + i] / wsum[k] : 0.0;
        v = std::max(v, sigma_floor[i] * sigma_floor[i]);
        var[k * d + i] = v;
      }
  }
  std::vector<double> w(K);
  for (std::size_t k = 0; k < K; ++k)
    w[k] = std::max(wsum[k] / weight_total, opts.weight_floor);

  // EM on the untruncated mixture.
  std::vector<double> resp(n * K);
  std::vector<double> comp_log(K), comp_base(K), inv_var(K * d);
  double prev_ll = -kInf;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // E step; per-component constants hoisted out of the point loop.
    for (std::size_t k = 0; k < K; ++k) {
      double ldet = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double v = var[k * d + i];
        inv_var[k * d + i] = 1.0 / v;
        ldet += std::log(v);
      }
      comp_base[k] = std::log(w[k]) - 0.5 * (ldet + d * kLogTwoPi);
    }
    double ll = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t k = 0; k < K; ++k) {
        double q = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double diff = data[p * d + i] - mu[k * d + i];
          q += diff * diff * inv_var[k * d + i];
        }
        comp_log[k] = comp_base[k] - 0.5 * q;
      }
      const double lse = log_sum_exp(comp_log.data(), K);
      ll += weights[p] * lse;
      for (std::size_t k = 0; k < K; ++k) resp[p * K + k] = std::exp(comp_log[k] - lse);
    }
    if (ll_history) ll_history->push_back(ll);

    // M step.
    std::fill(wsum.begin(), wsum.end(), 0.0);
    std::vector<double> acc(K * d, 0.0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t k = 0; k < K; ++k) {
        const double g = weights[p] * resp[p * K + k];
        wsum[k] += g;
        for (std::size_t i = 0; i < d; ++i) acc[k * d + i] += g * data[p * d + i];
      }
    for (std::size_t k = 0; k < K; ++k) {
      if (wsum[k] <= 1e-12 * weight_total) {
        // Dead component: re-seed at the heaviest, worst-explained point.
        std::size_t best = 0;
        double best_score = -kInf;
        for (std::size_t p = 0; p < n; ++p) {
          if (weights[p] <= 0.0) continue;
          for (std::size_t kk = 0; kk < K; ++kk) {
            double q = 0.0, ldet = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
              const double v = var[kk * d + i];
              const double diff = data[p * d + i] - mu[kk * d + i];
              q += diff * diff / v;
              ldet += std::log(v);
            }
            comp_log[kk] = std::log(w[kk]) - 0.5 * (q + ldet + d * kLogTwoPi);
          }
          const double score = std::log(weights[p]) - log_sum_exp(comp_log.data(), K);
          if (score > best_score) {
            best_score = score;
            best = p;
          }
        }
        for (std::size_t i = 0; i < d; ++i) {
          mu[k * d + i] = data[best * d + i];
          var[k * d + i] = sigma_floor[i] * sigma_floor[i];
        }
        wsum[k] = opts.weight_floor * weight_total;
        continue;
      }
      for (std::size_t i = 0; i < d; ++i) mu[k * d + i] = acc[k * d + i] / wsum[k];
    }
    std::vector<double> vacc(K * d, 0.0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t k = 0; k < K; ++k) {
        const double g = weights[p] * resp[p * K + k];
        if (g == 0.0) continue;
        for (std::size_t i = 0; i < d; ++i) {
          const double diff = data[p * d + i] - mu[k * d + i];
          vacc[k * d + i] += g * diff * diff;
        }
      }
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < d; ++i) {
        double v = wsum[k] > 0.0 ? vacc[k * d + i] / wsum[k] : 0.0;
        var[k * d + i] = std::max(v, sigma_floor[i] * sigma_floor[i]);
      }
    double wtot = 0.0;
    for (std::size_t k = 0; k < K; ++k) wtot += wsum[k];
    for (std::size_t k = 0; k < K; ++k) w[k] = std::max(wsum[k] / wtot, opts.weight_floor);
    double wnorm = 0.0;
    for (double wk : w) wnorm += wk;
    for (auto& wk : w) wk /= wnorm;

    if (iter > 0 && std::abs(ll - prev_ll) < opts.rel_tol * (std::abs(ll) + 1.0)) break;
    prev_ll = ll;
  }

  std::vector<double> ls(K * d), logits(K);
  for (std::size_t j = 0; j < K * d; ++j) ls[j] = 0.5 * std::log(var[j]);
  for (std::size_t k = 0; k < K; ++k) logits[k] = std::log(w[k]);
  return GmmProposal(domain, std::move(mu), std::move(ls), std::move(logits));
}

GmmProposal gmm_fit_em(const Domain& domain, const std::vector<double>& data,
                       const std::vector<double>& weights, std::size_t d, const EmOptions& opts,
                       Rng& rng, std::vector<double>* ll_history) {
  if (d == 0 || data.size() % d != 0 || data.size() / d != weights.size())
    throw std::invalid_argument("EM data shape mismatch");
  return gmm_fit_em(domain, data.data(), weights.data(), weights.size(), d, opts, rng, ll_history);
}

}  // namespace rejsamp
