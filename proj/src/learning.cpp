#include "mmln/learning.hpp"

#include <cmath>
#include <cstddef>

namespace mmln {

namespace {

double log_sigmoid(double z) {
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Block size for the fixed-order reduction. Both execution policies sum
// sites block by block in the same grouping, so Serial and Parallel agree
// bit for bit at any thread count.
constexpr size_t kBlock = 256;

void validate_config(const LearnConfig& cfg) {
    if (!(cfg.l2_sigma > 0.0)) throw InputError("l2_sigma must be positive");
    if (!(cfg.step > 0.0)) throw InputError("step must be positive");
    if (cfg.max_iters < 0) throw InputError("max_iters must be non-negative");
    if (!(cfg.grad_tol > 0.0)) throw InputError("grad_tol must be positive");
}

struct EvalOut {
    double pll = 0.0;
    std::vector<double> grad;
};

EvalOut eval_pll(const PllStats& stats, std::span<const double> w, double l2_sigma, bool want_grad,
                 Exec exec) {
    const size_t nf = stats.formula_count;
    if (w.size() != nf)
        throw InputError("weight vector size " + std::to_string(w.size()) +
                         " does not match formula count " + std::to_string(nf));

    const size_t ns = stats.sites.size();
    const size_t nb = (ns + kBlock - 1) / kBlock;
    std::vector<double> pll_part(nb, 0.0);
    std::vector<double> grad_part(want_grad ? nb * nf : 0, 0.0);

    const bool parallel = (exec == Exec::Parallel);
#pragma omp parallel for schedule(static) if (parallel)
    for (long long bi = 0; bi < static_cast<long long>(nb); ++bi) {
        const size_t b = static_cast<size_t>(bi);
        const size_t lo = b * kBlock;
        const size_t hi = std::min(lo + kBlock, ns);
        double acc = 0.0;
        double* g = want_grad ? grad_part.data() + b * nf : nullptr;
        for (size_t s = lo; s < hi; ++s) {
            const SiteStats& site = stats.sites[s];
            double z = 0.0;
            for (size_t i = 0; i < nf; ++i) z += w[i] * (site.n_true[i] - site.n_false[i]);
            acc += site.observed ? log_sigmoid(z) : log_sigmoid(-z);
            if (want_grad) {
                const double resid = (site.observed ? 1.0 : 0.0) - sigmoid(z);
                for (size_t i = 0; i < nf; ++i)
                    g[i] += resid * (site.n_true[i] - site.n_false[i]);
            }
        }
        pll_part[b] = acc;
    }

    EvalOut out;
    for (size_t b = 0; b < nb; ++b) out.pll += pll_part[b];
    if (want_grad) {
        out.grad.assign(nf, 0.0);
        for (size_t b = 0; b < nb; ++b)
            for (size_t i = 0; i < nf; ++i) out.grad[i] += grad_part[b * nf + i];
    }

    const double inv_var = 1.0 / (l2_sigma * l2_sigma);
    for (size_t i = 0; i < nf; ++i) {
        out.pll -= w[i] * w[i] * 0.5 * inv_var;
        if (want_grad) out.grad[i] -= w[i] * inv_var;
    }
    return out;
}

}  // namespace

TrainingSet make_training_set(const Model& model, const EvidenceDB& db,
                              std::span<const std::string> case_ids, const LabelSet& labels,
                              SplitTag tag) {
    TrainingSet out;
    out.tag = tag;
    out.cases.reserve(case_ids.size());
    for (const auto& c : case_ids) {
        World w = closed_world_complete(db, model, c);
        for (size_t p = 0; p < model.schemas.size(); ++p)
            if (model.schemas[p].role == PredicateRole::Query)
                w.set(static_cast<int>(p), labels.label(c));
        out.cases.push_back(std::move(w));
    }
    return out;
}

PllStats PllStats::build(const Model& model, const TrainingSet& train, Exec exec) {
    std::vector<int> hidden;
    for (size_t p = 0; p < model.schemas.size(); ++p)
        if (model.schemas[p].role != PredicateRole::Evidence) hidden.push_back(static_cast<int>(p));

    PllStats stats;
    stats.formula_count = model.formulas.size();
    const size_t nc = train.cases.size();
    stats.sites.resize(nc * hidden.size());

    const bool parallel = (exec == Exec::Parallel);
#pragma omp parallel for schedule(static) if (parallel)
    for (long long ci = 0; ci < static_cast<long long>(nc); ++ci) {
        const size_t c = static_cast<size_t>(ci);
        GroundingTable table = ground_formulas(model, train.cases[c].case_id);
        World world = train.cases[c];
        for (size_t h = 0; h < hidden.size(); ++h) {
            SiteStats& site = stats.sites[c * hidden.size() + h];
            const int atom = hidden[h];
            const bool observed = world.value(atom);
            world.set(atom, true);
            auto nt = count_true_groundings(table, world);
            world.set(atom, false);
            auto nfc = count_true_groundings(table, world);
            world.set(atom, observed);
            site.n_true.assign(nt.begin(), nt.end());
            site.n_false.assign(nfc.begin(), nfc.end());
            site.observed = observed;
        }
    }
    return stats;
}

double pseudo_log_likelihood(const Model& model, std::span<const double> weights,
                             const TrainingSet& train, double l2_sigma, Exec exec) {
    PllStats stats = PllStats::build(model, train, exec);
    return eval_pll(stats, weights, l2_sigma, /*want_grad=*/false, exec).pll;
}

std::vector<double> pll_gradient(const Model& model, std::span<const double> weights,
                                 const TrainingSet& train, double l2_sigma, Exec exec) {
    PllStats stats = PllStats::build(model, train, exec);
    return eval_pll(stats, weights, l2_sigma, /*want_grad=*/true, exec).grad;
}

LearnResult maximize_pll(const Model& model, const TrainingSet& train, const LearnConfig& cfg,
                         std::vector<double> w, Exec exec) {
    validate_config(cfg);
    if (train.cases.empty()) throw InputError("empty training set");
    if (w.size() != model.formulas.size())
        throw InputError("initial weight vector does not match formula count");

    const PllStats stats = PllStats::build(model, train, exec);
    const double inf = std::numeric_limits<double>::infinity();

    EvalOut cur = eval_pll(stats, w, cfg.l2_sigma, true, exec);
    if (!std::isfinite(cur.pll)) throw NumericError("objective is not finite at the start");

    LearnResult out;
    out.diagnostics.pll_trace.push_back(cur.pll);

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    };

    constexpr double armijo = 1e-4;
    double trial = cfg.step;
    int iters = 0;
    double gnorm = inf_norm(cur.grad);

    while (iters < cfg.max_iters && gnorm >= cfg.grad_tol) {
        double g2 = 0.0;
        for (double g : cur.grad) g2 += g * g;

        double t = trial;
        std::vector<double> w_next(w.size());
        double pll_next = -inf;
        bool accepted = false;
        while (t >= 1e-18) {
            for (size_t i = 0; i < w.size(); ++i) w_next[i] = w[i] + t * cur.grad[i];
            pll_next = eval_pll(stats, w_next, cfg.l2_sigma, false, exec).pll;
            if (!std::isfinite(pll_next))
                throw NumericError("objective became non-finite during line search");
            if (pll_next >= cur.pll + armijo * t * g2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // step underflow; no ascent direction progress possible

        w = w_next;
        cur = eval_pll(stats, w, cfg.l2_sigma, true, exec);
        gnorm = inf_norm(cur.grad);
        out.diagnostics.pll_trace.push_back(cur.pll);
        trial = t * 2.0;
        ++iters;
    }

    out.weights = std::move(w);
    out.diagnostics.final_pll = cur.pll;
    out.diagnostics.iterations = iters;
    out.diagnostics.grad_inf_norm = gnorm;
    out.diagnostics.converged = gnorm < cfg.grad_tol;
    return out;
}

LearnResult learn_weights(const Model& model, const TrainingSet& train, const LearnConfig& cfg,
                          Exec exec) {
    // Zero initialization is part of the contract, not a default.
    return maximize_pll(model, train, cfg, std::vector<double>(model.formulas.size(), 0.0), exec);
}

}  // namespace mmln
