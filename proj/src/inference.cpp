#include "mmln/inference.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

namespace mmln {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double world_energy(const GroundingTable& table, std::span<const double> w, const World& world) {
    double s = 0.0;
    for (size_t f = 0; f < table.formulas.size(); ++f)
        for (const auto& g : table.formulas[f])
            if (grounding_satisfied(g, world)) s += w[f];
    return s;
}

// Online log-sum-exp with max rescaling.
struct LogSum {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double v) {
        if (v <= max) {
            sum += std::exp(v - max);
        } else {
            sum = sum * std::exp(max - v) + 1.0;
            max = v;
        }
    }
    double value() const { return max + std::log(sum); }
    bool empty() const { return sum == 0.0; }
};

std::vector<int> query_atoms(const Model& model) {
    std::vector<int> hidden;
    for (size_t p = 0; p < model.schemas.size(); ++p)
        if (model.schemas[p].role != PredicateRole::Evidence)
            hidden.push_back(static_cast<int>(p));
    return hidden;
}

GroundAtom query_ground_atom(const Model& model, const std::string& case_id) {
    int q = model.query_predicate();
    const auto& schema = model.schemas[static_cast<size_t>(q)];
    GroundAtom a;
    a.predicate = schema.name;
    a.args.assign(static_cast<size_t>(schema.arity()), case_id);
    return a;
}

void check_weights(const Model& model, std::span<const double> w) {
    if (w.size() != model.formulas.size())
        throw InputError("weight vector size " + std::to_string(w.size()) +
                         " does not match formula count " + std::to_string(model.formulas.size()));
}

}  // namespace

namespace detail {

double exact_query_probability(const GroundingTable& table, std::span<const double> weights,
                               World world, std::span<const int> hidden, int query_atom) {
    if (hidden.size() > 25)
        throw InputError("too many hidden atoms to enumerate exactly");

    LogSum z_true, z_false;
    const uint64_t n_worlds = 1ull << hidden.size();
    for (uint64_t mask = 0; mask < n_worlds; ++mask) {
        for (size_t h = 0; h < hidden.size(); ++h)
            world.set(hidden[h], (mask >> h) & 1u);
        double s = world_energy(table, weights, world);
        (world.value(query_atom) ? z_true : z_false).add(s);
    }
    if (z_true.empty() || z_false.empty())
        throw InputError("query atom is not among the hidden atoms");
    return sigmoid(z_true.value() - z_false.value());
}

double gibbs_query_probability(const GroundingTable& table, std::span<const double> weights,
                               World world, std::span<const int> hidden, int query_atom,
                               int burn_in, int samples, uint64_t seed) {
    if (samples <= 0) throw InputError("samples must be positive");
    if (burn_in < 0) throw InputError("burn_in must be non-negative");

    // Groundings touching each hidden atom; only they change energy on a flip.
    std::vector<std::vector<std::pair<int, const Grounding*>>> adjacent(hidden.size());
    for (size_t h = 0; h < hidden.size(); ++h) {
        const int atom = hidden[h];
        for (size_t f = 0; f < table.formulas.size(); ++f)
            for (const auto& g : table.formulas[f]) {
                bool touches = (g.head_atom == atom);
                for (const auto& lit : g.body) touches = touches || (lit.atom == atom);
                if (touches)
                    adjacent[h].push_back({static_cast<int>(f), &g});
            }
    }

    std::mt19937_64 rng(seed);
    for (size_t h = 0; h < hidden.size(); ++h)
        world.set(hidden[h], uniform01(rng) < 0.5);

    auto sweep = [&] {
        for (size_t h = 0; h < hidden.size(); ++h) {
            const int atom = hidden[h];
            double delta = 0.0;
            for (const auto& [f, g] : adjacent[h]) {
                world.set(atom, true);
                const bool sat_t = grounding_satisfied(*g, world);
                world.set(atom, false);
                const bool sat_f = grounding_satisfied(*g, world);
                delta += weights[static_cast<size_t>(f)] *
                         ((sat_t ? 1.0 : 0.0) - (sat_f ? 1.0 : 0.0));
            }
            world.set(atom, uniform01(rng) < sigmoid(delta));
        }
    };

    for (int i = 0; i < burn_in; ++i) sweep();
    long hits = 0;
    for (int i = 0; i < samples; ++i) {
        sweep();
        if (world.value(query_atom)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace detail

MarginalResult exact_marginal(const Model& model, std::span<const double> weights,
                              const EvidenceDB& db, const std::string& case_id) {
    check_weights(model, weights);
    World world = closed_world_complete(db, model, case_id);
    GroundingTable table = ground_formulas(model, case_id);
    auto hidden = query_atoms(model);
    double p = detail::exact_query_probability(table, weights, std::move(world), hidden,
                                               model.query_predicate());
    return {query_ground_atom(model, case_id), p, InferMethod::Exact, 0};
}

MarginalResult gibbs_marginal(const Model& model, std::span<const double> weights,
                              const EvidenceDB& db, const std::string& case_id,
                              const InferenceConfig& cfg) {
    check_weights(model, weights);
    World world = closed_world_complete(db, model, case_id);
    GroundingTable table = ground_formulas(model, case_id);
    auto hidden = query_atoms(model);
    double p = detail::gibbs_query_probability(table, weights, std::move(world), hidden,
                                               model.query_predicate(), cfg.burn_in, cfg.samples,
                                               derive_seed(cfg.seed, case_id));
    return {query_ground_atom(model, case_id), p, InferMethod::Gibbs, cfg.samples};
}

std::vector<MarginalResult> infer_batch(const Model& model, std::span<const double> weights,
                                        const EvidenceDB& db,
                                        std::span<const std::string> case_ids,
                                        const InferenceConfig& cfg, Exec exec) {
    check_weights(model, weights);
    const size_t n = case_ids.size();
    std::vector<MarginalResult> results(n);
    std::vector<std::string> errors(n);

    const bool parallel = (exec == Exec::Parallel);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const size_t k = static_cast<size_t>(i);
        try {
            results[k] = (cfg.method == InferMethod::Exact)
                             ? exact_marginal(model, weights, db, case_ids[k])
                             : gibbs_marginal(model, weights, db, case_ids[k], cfg);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (size_t k = 0; k < n; ++k)
        if (!errors[k].empty())
            throw InputError("case '" + case_ids[k] + "': " + errors[k]);
    return results;
}

std::string format_marginals(std::span<const MarginalResult> results) {
    std::string out;
    char buf[32];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, " %.5f", r.probability);
        out += to_string(r.query);
        out += buf;
        out += '\n';
    }
    return out;
}

std::string marginals_to_json(std::span<const MarginalResult> results) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json item;
        item["query"] = to_string(r.query);
        item["probability"] = r.probability;
        item["method"] = (r.method == InferMethod::Exact) ? "exact" : "gibbs";
        item["samples_used"] = r.samples_used;
        arr.push_back(std::move(item));
    }
    return arr.dump(2) + "\n";
}

std::vector<std::pair<GroundAtom, double>> parse_marginals(std::string_view text) {
    std::vector<std::pair<GroundAtom, double>> out;
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        bool last = (end == std::string_view::npos);
        std::string_view raw = text.substr(start, last ? text.size() - start : end - start);
        start = last ? text.size() + 1 : end + 1;
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty()) continue;

        size_t sp = raw.find(' ');
        size_t open = raw.find('(');
        size_t close = raw.find(')');
        if (sp == std::string_view::npos || open == std::string_view::npos ||
            close == std::string_view::npos || open > sp || close > sp || open + 1 >= close)
            throw ParseError("expected 'Pred(Const) probability'", lineno, 1);

        GroundAtom atom;
        atom.predicate = std::string(raw.substr(0, open));
        std::string_view args = raw.substr(open + 1, close - open - 1);
        size_t p = 0;
        while (p <= args.size()) {
            size_t comma = args.find(',', p);
            size_t stop = (comma == std::string_view::npos) ? args.size() : comma;
            atom.args.emplace_back(args.substr(p, stop - p));
            if (comma == std::string_view::npos) break;
            p = comma + 1;
        }

        double prob = 0.0;
        std::string_view rest = raw.substr(sp + 1);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), prob);
        if (ec != std::errc())
            throw ParseError("bad probability", lineno, static_cast<int>(sp) + 2);
        (void)ptr;
        out.push_back({std::move(atom), prob});
    }
    return out;
}

}  // namespace mmln
