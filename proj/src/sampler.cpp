// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

void SamplerConfig::validate() const {
  require_positive(static_cast<double>(T), "T");
  require_positive(n_base, "n_base");
  require_positive(c_low_inflate, "c_low_inflate");
  require_positive(accept_weight, "accept_weight");
  require_positive(gmm_growth, "gmm_growth");
  require_positive(gmm_k_cap_divisor, "gmm_k_cap_divisor");
  require_positive(refine_steps, "refine_steps");
  require_positive(refine_lr, "refine_lr");
  require_positive(init_mode_steps, "init_mode_steps");
  require_positive(init_spread_steps, "init_spread_steps");
  require_positive(accel_step_size, "accel_step_size");
  require_positive(init_epsilon, "init_epsilon");
  require_positive(zero_search_max, "zero_search_max");
  require_positive(em_max_iters, "em_max_iters");
  require_positive(em_rel_tol, "em_rel_tol");
  require_positive(variance_floor_scale, "variance_floor_scale");
  require_positive(weight_floor, "weight_floor");
  require_positive(max_feval_factor, "max_feval_factor");
  if (refine_checkpoints.empty())
    throw std::invalid_argument("refine_checkpoints must be non-empty");
  for (int c : refine_checkpoints) require_positive(c, "refine_checkpoints entry");
}

namespace {

nlohmann::json config_to_json_obj(const SamplerConfig& c) {
  return nlohmann::json{{"T", c.T},
                        {"n_base", c.n_base},
                        {"c_low_inflate", c.c_low_inflate},
                        {"accept_weight", c.accept_weight},
                        {"gmm_growth", c.gmm_growth},
                        {"gmm_k_cap_divisor", c.gmm_k_cap_divisor},
                        {"refine_steps", c.refine_steps},
                        {"refine_checkpoints", c.refine_checkpoints},
                        {"refine_lr", c.refine_lr},
                        {"seed", c.seed},
                        {"init_mode_steps", c.init_mode_steps},
                        {"init_spread_steps", c.init_spread_steps},
                        {"accel_step_size", c.accel_step_size},
                        {"init_epsilon", c.init_epsilon},
                        {"zero_search_max", c.zero_search_max},
                        {"em_max_iters", c.em_max_iters},
                        {"em_rel_tol", c.em_rel_tol},
                        {"variance_floor_scale", c.variance_floor_scale},
                        {"weight_floor", c.weight_floor},
                        {"max_feval_factor", c.max_feval_factor},
                        {"threads", c.threads}};
}

}  // namespace

std::string SamplerConfig::to_json() const { return config_to_json_obj(*this).dump(); }

void SamplerConfig::apply_json_overrides(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("constants file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "T") T = value.get<std::int64_t>();
    else if (key == "n_base") n_base = value.get<double>();
    else if (key == "c_low_inflate") c_low_inflate = value.get<double>();
    else if (key == "accept_weight") accept_weight = value.get<double>();
    else if (key == "gmm_growth") gmm_growth = value.get<double>();
    else if (key == "gmm_k_cap_divisor") gmm_k_cap_divisor = value.get<double>();
    else if (key == "refine_steps") refine_steps = value.get<int>();
    else if (key == "refine_checkpoints") refine_checkpoints = value.get<std::vector<int>>();
    else if (key == "refine_lr") refine_lr = value.get<double>();
    else if (key == "seed") seed = value.get<std::uint64_t>();
    else if (key == "init_mode_steps") init_mode_steps = value.get<int>();
    else if (key == "init_spread_steps") init_spread_steps = value.get<int>();
    else if (key == "accel_step_size") accel_step_size = value.get<double>();
    else if (key == "init_epsilon") init_epsilon = value.get<double>();
    else if (key == "zero_search_max") zero_search_max = value.get<int>();
    else if (key == "em_max_iters") em_max_iters = value.get<int>();
    else if (key == "em_rel_tol") em_rel_tol = value.get<double>();
    else if (key == "variance_floor_scale") variance_floor_scale = value.get<double>();
    else if (key == "weight_floor") weight_floor = value.get<double>();
    else if (key == "max_feval_factor") max_feval_factor = value.get<double>();
    else if (key == "threads") threads = value.get<int>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
}

void batch_step(SamplerState& st, TargetEvaluator& ev, const SamplerConfig& cfg, Rng& rng) {
  const std::size_t d = st.proposal.dims();
  const std::size_t K = st.proposal.components();
  const std::size_t B = static_cast<std::size_t>(
      std::ceil(cfg.n_base * std::max(1.0, std::log(static_cast<double>(K) + 1.0))));

  const std::size_t base = st.draws();
  st.points.resize((base + B) * d);
  st.proposal.sample_into(rng, B, st.points.data() + base * d, &st.degenerate_warnings);

  st.logf.resize(base + B);
  st.logg_at_draw.resize(base + B);
  st.u.resize(base + B);
  st.epoch_of.resize(base + B, st.epoch_id);
  st.accepted.resize(base + B, 0);

  double batch_sup = -kInf;
  std::vector<double> row(d);
  for (std::size_t i = 0; i < B; ++i) {
    const double* p = st.points.data() + (base + i) * d;
    row.assign(p, p + d);
    const double lf = ev.value(row);
    const double lg = st.proposal.log_density(p);
    st.logf[base + i] = lf;
    st.logg_at_draw[base + i] = lg;
    if (lg == -kInf) {
      // The proposal underflowed on its own draw; the ratio is unusable.
      ++st.degenerate_warnings;
      continue;
    }
    if (lf != -kInf) batch_sup = std::max(batch_sup, lf - lg);
  }

  st.refine_flag =
      st.refine_flag || batch_sup > st.c_hat_log || batch_sup > st.c_low_log;
  st.c_hat_log = std::max(st.c_hat_log, batch_sup);
  st.c_low_log = std::min(st.c_low_log + std::log(cfg.c_low_inflate), batch_sup);

  std::int64_t naccept = 0;
  for (std::size_t i = 0; i < B; ++i) {
    const std::size_t idx = base + i;
    const double ui = rng.uniform();
    st.u[idx] = ui;
    const double lf = st.logf[idx];
    const double lg = st.logg_at_draw[idx];
    bool acc = false;
    if (lf != -kInf && lg != -kInf && st.c_hat_log != -kInf)
      acc = std::log(ui) <= lf - st.c_hat_log - lg;
    if (acc) {
      st.accepted[idx] = 1;
      st.accepted_order.push_back(idx);
      ++naccept;
    }
  }

  st.batches.push_back({st.epoch_id, batch_sup, static_cast<std::int64_t>(B), naccept});
  st.epochs.back().batch_sups_log.push_back(batch_sup);
}

std::optional<GmmProposal> maybe_refit_gmm(SamplerState& st, const SamplerConfig& cfg, Rng& rng) {
  const std::int64_t na = st.accepted_count();
  if (na < 1) return std::nullopt;
  const double dna = static_cast<double>(na);
  const std::size_t K = st.proposal.components();
  const bool grown = dna >= cfg.gmm_growth * static_cast<double>(st.accepted_at_last_fit);
  const bool underclustered = std::log(dna) > 2.0 * static_cast<double>(K);
  if (!grown && !underclustered) return std::nullopt;

  const std::size_t d = st.proposal.dims();
  const double kraw =
      std::min(std::log2(dna), dna / (static_cast<double>(d) * cfg.gmm_k_cap_divisor));
  const std::int64_t kprime = static_cast<std::int64_t>(std::floor(kraw));
  if (kprime < 1) return std::nullopt;

  // Weights: exp(logf - max logf), accepted points further scaled; zero-density
  // points drop out entirely.
  double max_lf = -kInf;
  for (double lf : st.logf) max_lf = std::max(max_lf, lf);
  if (max_lf == -kInf) return std::nullopt;

  std::vector<double> data;
  std::vector<double> weights;
  data.reserve(st.draws() * d);
  weights.reserve(st.draws());
  for (std::size_t i = 0; i < st.draws(); ++i) {
    if (st.logf[i] == -kInf) continue;
    double w = std::exp(st.logf[i] - max_lf);
    if (st.accepted[i]) w *= cfg.accept_weight;
    if (w <= 0.0) continue;
    weights.push_back(w);
    const double* p = st.points.data() + i * d;
    data.insert(data.end(), p, p + d);
  }
  const std::size_t n = weights.size();
  if (n < static_cast<std::size_t>(kprime)) return std::nullopt;
  if (n <= 4096) {
    // Tiny caches can carry duplicates (degenerate resampling); EM needs at
    // least K' distinct rows.
    std::set<std::vector<double>> distinct;
    for (std::size_t i = 0; i < n && distinct.size() < static_cast<std::size_t>(kprime); ++i)
      distinct.emplace(data.begin() + i * d, data.begin() + (i + 1) * d);
    if (distinct.size() < static_cast<std::size_t>(kprime)) return std::nullopt;
  }

  EmOptions em;
  em.K = static_cast<std::size_t>(kprime);
  em.max_iters = cfg.em_max_iters;
  em.rel_tol = cfg.em_rel_tol;
  em.variance_floor_scale = cfg.variance_floor_scale;
  em.weight_floor = cfg.weight_floor;
  try {
    GmmProposal fit =
        gmm_fit_em(st.proposal.domain(), data.data(), weights.data(), n, d, em, rng);
    st.accepted_at_last_fit = na;
    return fit;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

AuditResult audit(const SamplerState& st) {
  AuditResult res;
  const std::size_t d = st.proposal.dims();
  for (const std::size_t idx : st.accepted_order) {
    const EpochRecord& er = st.epochs.at(static_cast<std::size_t>(st.epoch_of[idx]));
    const double lg = er.proposal.log_density(st.points.data() + idx * d);
    const double bound = st.logf[idx] - er.final_c_hat_log - lg;
    if (!(std::log(st.u[idx]) <= bound)) res.violations.push_back(idx);
  }
  return res;
}

RunResult run(const LogTarget& target, const SamplerConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  TargetEvaluator ev(target);
  const std::size_t d = target.domain.dims();

  InitOptions io;
  io.mode_steps = cfg.init_mode_steps;
  io.spread_steps = cfg.init_spread_steps;
  io.accel_step_size = cfg.accel_step_size;
  io.epsilon = cfg.init_epsilon;
  io.zero_search_max = cfg.zero_search_max;
  io.variance_floor_scale = cfg.variance_floor_scale;

  auto [g0, init_report] = initialize(ev, io, rng);

  SamplerState st(std::move(g0));

  RefineOptions ro;
  ro.steps = cfg.refine_steps;
  ro.checkpoints = cfg.refine_checkpoints;
  ro.lr = cfg.refine_lr;
  ro.threads = cfg.threads;

  const double feval_guard = cfg.max_feval_factor * static_cast<double>(cfg.T);
  bool aborted = false;
  std::string abort_reason;

  while (st.accepted_count() < cfg.T) {
    if (static_cast<double>(ev.eval_count()) > feval_guard) {
      aborted = true;
      abort_reason = "target evaluation budget exceeded (" +
                     std::to_string(ev.eval_count()) + " evaluations)";
      break;
    }
    batch_step(st, ev, cfg, rng);
    const std::optional<GmmProposal> refit = maybe_refit_gmm(st, cfg, rng);

    if (st.refine_flag || refit.has_value()) {
      const std::size_t n = st.draws();
      struct Candidate {
        GmmProposal proposal;
        double ratio;
      };
      std::vector<Candidate> cands;
      // A failed refinement falls back to its input proposal with that
      // proposal's exact cache supremum; for the incumbent that supremum
      // never exceeds c_hat, so the flag always resolves by re-anchoring
      // c_hat to the cache maximum and opening a fresh epoch.
      const RefineResult r_cur =
          refine(st.proposal, st.points.data(), st.logf.data(), n, st.c_hat_log, ro);
      cands.push_back({r_cur.proposal, r_cur.achieved_log_ratio_max});
      if (refit.has_value()) {
        const RefineResult r_fit =
            refine(*refit, st.points.data(), st.logf.data(), n, st.c_hat_log, ro);
        cands.push_back({r_fit.proposal, r_fit.achieved_log_ratio_max});
      }
      const Candidate* best = nullptr;
      for (const Candidate& c : cands)
        if (best == nullptr || c.ratio < best->ratio) best = &c;
      if (best != nullptr && std::isfinite(best->ratio) && best->ratio <= st.c_hat_log) {
        st.epochs.back().final_c_hat_log = st.c_hat_log;
        st.proposal = best->proposal;
        st.c_hat_log = best->ratio;
        st.c_low_log = best->ratio;
        ++st.epoch_id;
        st.epochs.push_back({st.proposal, 0.0, {}});
      }
      st.refine_flag = false;
    }
  }
  st.epochs.back().final_c_hat_log = st.c_hat_log;

  RunResult out;
  out.dims = d;
  const std::int64_t keep = std::min<std::int64_t>(cfg.T, st.accepted_count());
  out.samples.reserve(static_cast<std::size_t>(keep) * d);
  for (std::int64_t s = 0; s < keep; ++s) {
    const std::size_t idx = st.accepted_order[static_cast<std::size_t>(s)];
    const double* p = st.points.data() + idx * d;
    out.samples.insert(out.samples.end(), p, p + d);
  }

  out.report.config = cfg;
  out.report.f_evals = ev.eval_count();
  out.report.accepted_total = st.accepted_count();
  out.report.acceptance_rate =
      out.report.f_evals > 0
          ? static_cast<double>(out.report.accepted_total) / static_cast<double>(out.report.f_evals)
          : 0.0;
  out.report.init = init_report;
  out.report.epochs = st.epochs;
  out.report.audit = audit(st);
  out.report.degenerate_warnings = st.degenerate_warnings;
  out.report.aborted = aborted;
  out.report.abort_reason = abort_reason;
  out.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["config"] = config_to_json_obj(config);
  j["seed"] = config.seed;
  j["T"] = config.T;
  j["f_evals"] = f_evals;
  j["accepted_total"] = accepted_total;
  j["acceptance_rate"] = acceptance_rate;
  j["wall_time_s"] = wall_time_s;
  j["degenerate_warnings"] = degenerate_warnings;
  j["aborted"] = aborted;
  if (aborted) j["abort_reason"] = abort_reason;

  nlohmann::json ji;
  ji["f_evals_used"] = init.f_evals_used;
  ji["modal"] = InitReport::modal_name(init.modal);
  ji["K"] = init.K;
  ji["zero_search_draws"] = init.zero_search_draws;
  ji["spread_fallback"] = init.spread_fallback;
  nlohmann::json jm = nlohmann::json::array();
  for (const auto& mode : init.modes_found) jm.push_back(mode);
  ji["modes_found"] = jm;
  j["init"] = ji;

  nlohmann::json je = nlohmann::json::array();
  for (const auto& e : epochs) {
    nlohmann::json one;
    one["final_C_log"] = e.final_c_hat_log;
    one["proposal"] = nlohmann::json::parse(e.proposal.to_json());
    one["batch_sups_log"] = e.batch_sups_log;
    je.push_back(one);
  }
  j["epochs"] = je;

  j["audit"] = {{"violations", audit.violations}, {"pass", audit.pass()}};
  return j.dump(2);
}

}  // namespace rejsamp
