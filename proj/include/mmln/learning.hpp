#ifndef MMLN_LEARNING_HPP
#define MMLN_LEARNING_HPP

#include <span>
#include <vector>

#include "mmln/grounding.hpp"

namespace mmln {

enum class SplitTag { Train, Test };

// Labeled cases: complete worlds (closed-world evidence, observed query atom).
struct TrainingSet {
    std::vector<World> cases;
    SplitTag tag = SplitTag::Train;
};

TrainingSet make_training_set(const Model& model, const EvidenceDB& db,
                              std::span<const std::string> case_ids, const LabelSet& labels,
                              SplitTag tag = SplitTag::Train);

struct LearnConfig {
    double l2_sigma = 10.0;  // Gaussian prior std on weights
    double step = 0.1;       // initial line-search step
    int max_iters = 500;
    double grad_tol = 1e-5;  // convergence threshold on the gradient infinity norm
    uint64_t seed = 0;       // reserved for case shuffling; the full-batch
                             // optimizer is order-fixed, so it has no effect
};

// ---------------------------------------------------------------------------
// Per-site sufficient statistics. A site is one (case, non-evidence atom)
// pair; under closed-world evidence the non-evidence atoms are exactly the
// query atoms, but the code iterates whatever the model declares.
// ---------------------------------------------------------------------------
struct SiteStats {
    std::vector<double> n_true;   // formula counts with the site atom forced true
    std::vector<double> n_false;  // ... forced false
    bool observed = false;        // the atom's value in the training world
};

struct PllStats {
    std::vector<SiteStats> sites;  // case order, then query-atom order
    size_t formula_count = 0;

    static PllStats build(const Model& model, const TrainingSet& train,
                          Exec exec = Exec::Parallel);
};

// Sum over sites of log P(X_site = observed | rest) minus the L2 penalty
// sum_i w_i^2 / (2 sigma^2).
double pseudo_log_likelihood(const Model& model, std::span<const double> weights,
                             const TrainingSet& train, double l2_sigma,
                             Exec exec = Exec::Parallel);

std::vector<double> pll_gradient(const Model& model, std::span<const double> weights,
                                 const TrainingSet& train, double l2_sigma,
                                 Exec exec = Exec::Parallel);

struct LearnDiagnostics {
    double final_pll = 0.0;
    int iterations = 0;
    double grad_inf_norm = 0.0;
    bool converged = false;
    std::vector<double> pll_trace;  // objective after each accepted step
};

struct LearnResult {
    std::vector<double> weights;
    LearnDiagnostics diagnostics;
};

// Gradient ascent with backtracking (Armijo) line search from an explicit
// starting point. The PLL with L2 prior is strictly concave, so the fixed
// point does not depend on the start.
LearnResult maximize_pll(const Model& model, const TrainingSet& train, const LearnConfig& cfg,
                         std::vector<double> initial_weights, Exec exec = Exec::Parallel);

// Weights initialized to zero, then maximize_pll.
LearnResult learn_weights(const Model& model, const TrainingSet& train, const LearnConfig& cfg,
                          Exec exec = Exec::Parallel);

}  // namespace mmln

#endif
