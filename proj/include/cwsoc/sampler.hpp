#pragma once

// Samplers for the tilted measure.
//
// Route 1: single-site random-walk Metropolis on (x_1, ..., x_n) targeting
//   exp(S^2 / (2T) - T / (2 sigma^2)), with (S, T) updated in O(1) per step.
// Route 2: exact draws of (S, T) from the untilted n-fold convolution,
//   reweighted by exp(S^2 / (2T)) (self-normalized importance sampling).
//
// The two routes share nothing beyond the model-core formulas, so agreement
// between them is a meaningful cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cwsoc/errors.hpp"
#include "cwsoc/model.hpp"
#include "cwsoc/rng.hpp"

namespace cwsoc {

struct SamplerConfig {
  double proposal_scale = 2.38;  // in units of sigma
  std::uint64_t burn_in_sweeps = 0;
  std::uint64_t thin_sweeps = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(proposal_scale > 0.0) || !std::isfinite(proposal_scale))
      throw DomainError("SamplerConfig: proposal_scale must be positive");
    if (thin_sweeps == 0) throw DomainError("SamplerConfig: thin_sweeps must be positive");
  }
};

/// Cached (S, T) are recomputed from scratch every this many sweeps.
inline constexpr std::uint64_t kResyncSweeps = 10000;

struct ChainState {
  Configuration config;
  SumStats stats;
  ModelParams params;
  SamplerConfig sampler;
  Rng rng;
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
  std::uint64_t sweeps_done = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct SampleRecord {
  std::uint64_t sweep = 0;
  double s = 0.0;
  double t = 0.0;
  double s_scaled = 0.0;  // s / n^(3/4)
  double t_scaled = 0.0;  // t / n
};

/// Draws x_i iid N(0, sigma^2). Deterministic in cfg.seed.
inline ChainState init_chain(const ModelParams& params, const SamplerConfig& cfg) {
  cfg.validate();
  ChainState chain{Configuration(params.n), {}, params, cfg, Rng(cfg.seed)};
  do {
    for (double& x : chain.config) x = params.sigma * chain.rng.normal();
    chain.stats = sum_stats(chain.config);
  } while (!(chain.stats.t > 0.0));
  return chain;
}

/// Statistics after moving one site from x_old to x_new, and the Metropolis
/// log acceptance ratio. `admissible` is false when the move would make T
/// nonpositive; such moves are rejected without drawing.
struct SiteProposal {
  SumStats stats;
  double log_ratio = 0.0;
  bool admissible = false;
};

inline SiteProposal propose_site_update(const SumStats& current, double x_old, double x_new, double sigma) {
  SiteProposal p;
  if (x_new == x_old) {
    // Identity move: skip the arithmetic, whose rounding could make Delta nonzero.
    p.stats = current;
    p.admissible = current.t > 0.0;
    return p;
  }
  p.stats.s = current.s - x_old + x_new;
  p.stats.t = current.t - x_old * x_old + x_new * x_new;
  if (!(p.stats.t > 0.0)) return p;
  p.admissible = true;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const double before = current.s * current.s / (2.0 * current.t) - current.t * inv_two_var;
  const double after = p.stats.s * p.stats.s / (2.0 * p.stats.t) - p.stats.t * inv_two_var;
  p.log_ratio = after - before;
  return p;
}

/// Applies a proposal for site k with an externally supplied uniform u in
/// (0, 1): accepted iff log_ratio >= 0 or ln u < log_ratio.
inline bool apply_site_proposal(ChainState& chain, std::size_t k, double x_new, double u) {
  ++chain.proposed;
  const SiteProposal p = propose_site_update(chain.stats, chain.config[k], x_new, chain.params.sigma);
  if (!p.admissible) return false;
  if (p.log_ratio < 0.0 && !(std::log(u) < p.log_ratio)) return false;
  chain.config[k] = x_new;
  chain.stats = p.stats;
  ++chain.accepted;
  return true;
}

/// Recomputes the cached statistics from the configuration.
inline void resync(ChainState& chain) { chain.stats = sum_stats(chain.config); }

/// One single-site Metropolis update.
inline bool step(ChainState& chain) {
  const auto k = static_cast<std::size_t>(chain.rng.below(chain.params.n));
  const double x_new =
      chain.config[k] + chain.sampler.proposal_scale * chain.params.sigma * chain.rng.normal();
  ++chain.proposed;
  const SiteProposal p = propose_site_update(chain.stats, chain.config[k], x_new, chain.params.sigma);
  if (!p.admissible) return false;
  if (p.log_ratio < 0.0 && !(std::log(chain.rng.uniform_open()) < p.log_ratio)) return false;
  chain.config[k] = x_new;
  chain.stats = p.stats;
  ++chain.accepted;
  return true;
}

/// n single-site updates; re-syncs the cached statistics on schedule.
inline void sweep(ChainState& chain) {
  for (std::size_t i = 0; i < chain.params.n; ++i) step(chain);
  ++chain.sweeps_done;
  if (chain.sweeps_done % kResyncSweeps == 0) resync(chain);
}

inline SampleRecord make_record(const ChainState& chain) {
  const double n = chain.params.dn();
  return {chain.sweeps_done, chain.stats.s, chain.stats.t, chain.stats.s / std::pow(n, 0.75),
          chain.stats.t / n};
}

/// Runs `sweeps` sweeps. Sweeps are counted over the chain's lifetime; a
/// record is emitted after sweep i when i > burn_in and (i - burn_in) is a
/// multiple of thin.
inline std::vector<SampleRecord> run(ChainState& chain, std::uint64_t sweeps) {
  std::vector<SampleRecord> records;
  const auto& cfg = chain.sampler;
  for (std::uint64_t i = 0; i < sweeps; ++i) {
    sweep(chain);
    const std::uint64_t idx = chain.sweeps_done;
    if (idx > cfg.burn_in_sweeps && (idx - cfg.burn_in_sweeps) % cfg.thin_sweeps == 0)
      records.push_back(make_record(chain));
  }
  return records;
}

/// Number of sweeps `run` needs to emit `samples` records from a fresh chain.
inline std::uint64_t sweeps_for_samples(const SamplerConfig& cfg, std::uint64_t samples) {
  return samples == 0 ? 0 : cfg.burn_in_sweeps + samples * cfg.thin_sweeps;
}

/// Exact draw of (sum Z_i, sum Z_i^2) with Z_i iid N(0, sigma^2).
inline SumStats sample_nu_star(const ModelParams& params, Rng& rng) {
  detail::CompensatedSum s, t;
  for (std::size_t i = 0; i < params.n; ++i) {
    const double z = params.sigma * rng.normal();
    s.add(z);
    t.add(z * z);
  }
  return {s.value(), t.value()};
}

struct ImportanceResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  bool reliable = false;  // false when ess < kMinReliableEss
};

inline constexpr double kMinReliableEss = 50.0;

/// Self-normalized importance estimate of E[f(S, T)] under the tilted law,
/// from draws of the untilted convolution weighted by exp(s^2 / 2t).
/// Standard error by the delta method.
template <class F>
ImportanceResult importance_estimate(F&& f, const ModelParams& params, std::uint64_t draws, Rng& rng) {
  if (draws < 100) throw DomainError("importance_estimate: needs at least 100 draws");
  std::vector<double> log_w(draws), values(draws);
  double max_log_w = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < draws; ++i) {
    const SumStats st = sample_nu_star(params, rng);
    log_w[i] = log_tilt_weight(st);
    values[i] = f(st);
    max_log_w = std::max(max_log_w, log_w[i]);
  }
  detail::CompensatedSum w_sum, w2_sum, wf_sum;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double w = std::exp(log_w[i] - max_log_w);
    log_w[i] = w;  // reused as the rescaled weight from here on
    w_sum.add(w);
    w2_sum.add(w * w);
    wf_sum.add(w * values[i]);
  }
  ImportanceResult r;
  const double W = w_sum.value();
  r.estimate = wf_sum.value() / W;
  detail::CompensatedSum var_sum;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double d = log_w[i] * (values[i] - r.estimate);
    var_sum.add(d * d);
  }
  r.std_error = std::sqrt(var_sum.value()) / W;
  r.ess = W * W / w2_sum.value();
  r.reliable = r.ess >= kMinReliableEss;
  return r;
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean with a batch-means standard error, which accounts for the
/// autocorrelation of MCMC output. Trailing values that do not fill a batch
/// are ignored for the error but included in the mean.
inline MeanEstimate batch_means(std::span<const double> values, std::size_t batches = 50) {
  if (values.size() < 2 * batches) throw DomainError("batch_means: too few values for the batch count");
  MeanEstimate out;
  detail::CompensatedSum total;
  for (double v : values) total.add(v);
  out.mean = total.value() / static_cast<double>(values.size());
  const std::size_t len = values.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) acc += values[i];
    means[b] = acc / static_cast<double>(len);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var_of_batch_mean = ss / static_cast<double>(batches - 1);
  out.std_error = std::sqrt(var_of_batch_mean / static_cast<double>(batches));
  return out;
}

}  // namespace cwsoc
