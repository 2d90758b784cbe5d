#ifndef MMLN_INFERENCE_HPP
#define MMLN_INFERENCE_HPP

#include <span>
#include <string>
#include <vector>

#include "mmln/grounding.hpp"

namespace mmln {

enum class InferMethod { Exact, Gibbs };

struct InferenceConfig {
    InferMethod method = InferMethod::Exact;
    int burn_in = 1000;
    int samples = 50000;
    uint64_t seed = 0;
};

struct MarginalResult {
    GroundAtom query;
    double probability = 0.0;
    InferMethod method = InferMethod::Exact;
    long samples_used = 0;  // 0 for Exact
};

namespace detail {

// Test-facing cores over an explicit hidden-atom set. `world` carries the
// fixed (evidence) part; hidden atoms are enumerated or resampled in place.

// Exact two-sided enumeration: P(query=true) from log-space sums over all
// assignments of `hidden` (query_atom must be one of them).
double exact_query_probability(const GroundingTable& table, std::span<const double> weights,
                               World world, std::span<const int> hidden, int query_atom);

// Single-chain Gibbs: uniform random init of hidden atoms, sequential sweeps,
// conditional sigma(delta energy) resampling, one sample per sweep after
// burn-in.
double gibbs_query_probability(const GroundingTable& table, std::span<const double> weights,
                               World world, std::span<const int> hidden, int query_atom,
                               int burn_in, int samples, uint64_t seed);

}  // namespace detail

MarginalResult exact_marginal(const Model& model, std::span<const double> weights,
                              const EvidenceDB& db, const std::string& case_id);

// Deterministic for fixed cfg.seed; the chain seed is cfg.seed xor
// fnv1a64(case_id), so batches are order-independent.
MarginalResult gibbs_marginal(const Model& model, std::span<const double> weights,
                              const EvidenceDB& db, const std::string& case_id,
                              const InferenceConfig& cfg);

// Per-case results in input order; per-case failures are reported with the
// case constant attached.
std::vector<MarginalResult> infer_batch(const Model& model, std::span<const double> weights,
                                        const EvidenceDB& db,
                                        std::span<const std::string> case_ids,
                                        const InferenceConfig& cfg, Exec exec = Exec::Parallel);

// `Pneumonia(P450945) 0.99895` lines, 5 decimals.
std::string format_marginals(std::span<const MarginalResult> results);
std::string marginals_to_json(std::span<const MarginalResult> results);

std::vector<std::pair<GroundAtom, double>> parse_marginals(std::string_view text);

}  // namespace mmln

#endif
