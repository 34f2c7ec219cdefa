#include "dht/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "dht/info.hpp"

namespace dht {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-trial, per-purpose stream keys: any fixed (seed, trial, tag) triple
// yields the same stream regardless of thread scheduling.
enum StreamTag : std::uint64_t { kTagBinning = 1, kTagSampleH0 = 2, kTagSampleH1 = 3 };

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) {
    return splitmix64(splitmix64(splitmix64(seed) ^ (trial * kGolden)) ^ (tag * 0xd1342543de82ef95ULL));
}

std::uint64_t prf(std::uint64_t key, std::uint64_t counter) {
    return splitmix64(key + counter * kGolden);
}

double uniform01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Unbiased-enough multiply-shift range reduction onto [0, bins).
std::uint64_t to_bin(std::uint64_t h, std::uint64_t bins) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h) * static_cast<unsigned __int128>(bins)) >> 64);
}

std::uint64_t bin_count(std::size_t n, double rate) {
    double b = std::exp(static_cast<double>(n) * rate);
    if (b >= 0x1.0p62) return 1ULL << 62;  // effectively injective binning
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(b)));
}

struct PairSampler {
    std::vector<double> cdf;  // over flat (x,y) cells
    std::size_t yc = 0;

    explicit PairSampler(const JointDistribution& d) : yc(d.card(1)) {
        double acc = 0.0;
        for (double v : d.probs()) {
            acc += v;
            cdf.push_back(acc);
        }
        cdf.back() = 1.0;
    }
    void sample(std::uint64_t key, std::size_t n, std::vector<std::size_t>& xs,
                std::vector<std::size_t>& ys) const {
        xs.resize(n);
        ys.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double u = uniform01(prf(key, i));
            std::size_t cell = 0;
            while (cell + 1 < cdf.size() && u >= cdf[cell]) ++cell;
            xs[i] = cell / yc;
            ys[i] = cell % yc;
        }
    }
};

std::uint64_t sequence_index(std::span<const std::size_t> xs, std::size_t x_card) {
    std::uint64_t f = 0;
    for (std::size_t i = xs.size(); i-- > 0;) f = f * x_card + xs[i];
    return f;
}

double count_score(const std::vector<std::size_t>& counts) {
    double s = 0.0;
    for (std::size_t c : counts)
        if (c > 0) s += static_cast<double>(c) * std::log(static_cast<double>(c));
    return s;
}

struct PhaseSetup {
    const PairSampler* sampler = nullptr;       // hypothesis to sample from
    const JointDistribution* accept_ref = nullptr;  // TV reference (the null joint)
    std::uint64_t sample_tag = 0;
};

/// Bin of a sequence with flat index f. Once the budget covers one bin per
/// sequence the assignment becomes the identity injection, so decoding is
/// exact at rates >= ln|X|; below that it is a seeded uniform hash.
std::uint64_t assign_bin(std::uint64_t key, std::uint64_t f, std::uint64_t bins,
                         std::uint64_t space) {
    if (bins >= space) return f;
    return to_bin(prf(key, f), bins);
}

struct PhaseOutcome {
    bool accepted = false;
    bool decode_error = false;
    std::vector<std::size_t> x_marginal_counts;  // announced type of the source
};

PhaseOutcome run_phase(const PhaseSetup& ph, std::size_t n, std::size_t x_card,
                       std::size_t y_card, std::uint64_t bins, double delta,
                       std::uint64_t seed, std::uint64_t trial, std::uint64_t tag_offset) {
    std::vector<std::size_t> xs, ys;
    ph.sampler->sample(stream_key(seed, trial, ph.sample_tag + tag_offset), n, xs, ys);

    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) space *= x_card;
    std::uint64_t bkey = stream_key(seed, trial, kTagBinning + tag_offset);
    std::uint64_t target = assign_bin(bkey, sequence_index(xs, x_card), bins, space);

    PhaseOutcome out;
    out.x_marginal_counts.assign(x_card, 0);
    for (std::size_t v : xs) out.x_marginal_counts[v] += 1;

    // Enumerate the announced type class in lexicographic order and keep
    // the members hashing into the announced bin; the source sequence is
    // always among them.
    std::vector<std::size_t> seq;
    for (std::size_t sym = 0; sym < x_card; ++sym)
        seq.insert(seq.end(), out.x_marginal_counts[sym], sym);
    std::vector<std::vector<std::size_t>> candidates;
    do {
        if (assign_bin(bkey, sequence_index(seq, x_card), bins, space) == target)
            candidates.push_back(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));

    std::vector<std::size_t> decoded = min_entropy_decode(candidates, ys, x_card, y_card);
    out.decode_error = decoded != xs;
    JointDistribution type = empirical_type(decoded, ys, x_card, y_card);
    out.accepted = total_variation(type, *ph.accept_ref) <= delta;
    return out;
}

void validate_common(const HypothesisPair& hp, const SchemeConfig& cfg) {
    if (hp.p.rank() != 2)
        throw ValidationError("simulate: expected a two-axis hypothesis pair");
    if (cfg.n < 1) throw ValidationError("simulate: blocklength must be at least 1");
    if (cfg.trials < 1) throw ValidationError("simulate: at least one trial required");
    if (cfg.rate < 0.0) throw ValidationError("simulate: rate must be non-negative");
    double space = 1.0;
    for (std::size_t i = 0; i < cfg.n; ++i) space *= static_cast<double>(hp.p.card(0));
    if (space > static_cast<double>(1 << 24))
        throw ValidationError(
            "simulate: |X|^n exceeds 2^24; exhaustive type-class decoding is infeasible");
}

/// The TV reference with canonical axis names so empirical types compare
/// against it regardless of the input pair's axis labels.
JointDistribution canonical_null(const JointDistribution& p) {
    return JointDistribution({{"X", p.card(0)}, {"Y", p.card(1)}},
                             std::vector<double>(p.probs().begin(), p.probs().end()));
}

void run_partitioned(std::size_t trials, unsigned threads, const std::function<void(std::size_t)>& body) {
    unsigned nthreads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, trials));
    if (nthreads <= 1) {
        for (std::size_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nthreads; ++k) {
        std::size_t lo = trials * k / nthreads;
        std::size_t hi = trials * (k + 1) / nthreads;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t t = lo; t < hi; ++t) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double default_delta(std::size_t n, std::size_t x_card, std::size_t y_card) {
    return 2.5 * std::sqrt(static_cast<double>(x_card * y_card) / static_cast<double>(n));
}

JointDistribution empirical_type(std::span<const std::size_t> xs,
                                 std::span<const std::size_t> ys,
                                 std::size_t x_card, std::size_t y_card) {
    if (xs.size() != ys.size())
        throw ValidationError("empirical_type: sequence lengths differ");
    if (xs.empty()) throw ValidationError("empirical_type: empty sequences");
    std::vector<std::size_t> counts(x_card * y_card, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] >= x_card || ys[i] >= y_card)
            throw ValidationError("empirical_type: symbol outside the alphabet");
        counts[xs[i] * y_card + ys[i]] += 1;
    }
    std::vector<double> probs(counts.size());
    double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        probs[i] = static_cast<double>(counts[i]) / n;
    return JointDistribution({{"X", x_card}, {"Y", y_card}}, std::move(probs));
}

std::vector<std::size_t> min_entropy_decode(const std::vector<std::vector<std::size_t>>& candidates,
                                            std::span<const std::size_t> y_seq,
                                            std::size_t x_card, std::size_t y_card) {
    if (candidates.empty())
        throw ValidationError("min_entropy_decode: empty candidate set");
    // Minimizing H(x~|y) of the joint type is maximizing sum c*ln(c) over
    // joint counts, since the y-marginal is common to all candidates.
    std::vector<std::size_t> counts(x_card * y_card);
    auto fill_counts = [&](const std::vector<std::size_t>& cand) {
        if (cand.size() != y_seq.size())
            throw ValidationError("min_entropy_decode: candidate length differs from y");
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (cand[i] >= x_card || y_seq[i] >= y_card)
                throw ValidationError("min_entropy_decode: symbol outside the alphabet");
            counts[cand[i] * y_card + y_seq[i]] += 1;
        }
    };

    const std::vector<std::size_t>* best = &candidates.front();
    fill_counts(*best);
    double best_score = count_score(counts);
    std::vector<std::size_t> best_sorted = counts;
    std::sort(best_sorted.begin(), best_sorted.end());

    for (std::size_t i = 1; i < candidates.size(); ++i) {
        fill_counts(candidates[i]);
        double score = count_score(counts);
        std::vector<std::size_t> sorted = counts;
        std::sort(sorted.begin(), sorted.end());
        bool tie = sorted == best_sorted || std::abs(score - best_score) <= 1e-9;
        if (tie) {
            if (std::lexicographical_compare(candidates[i].begin(), candidates[i].end(),
                                             best->begin(), best->end())) {
                best = &candidates[i];
                best_score = score;
                best_sorted = std::move(sorted);
            }
        } else if (score > best_score) {
            best = &candidates[i];
            best_score = score;
            best_sorted = std::move(sorted);
        }
    }
    return *best;
}

ErrorEstimate wilson_estimate(std::size_t successes, std::size_t trials) {
    if (trials == 0) throw ValidationError("wilson_estimate: trials must be positive");
    if (successes > trials)
        throw ValidationError("wilson_estimate: successes exceed trials");
    const double z = 1.959963984540054;
    double n = static_cast<double>(trials);
    double phat = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = (z / denom) * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    ErrorEstimate e;
    e.value = phat;
    e.wilson_ci_95 = {std::max(center - half, 0.0), std::min(center + half, 1.0)};
    // The score interval's endpoints are exact at the boundary; keep them so
    // despite rounding in the quadratic formula.
    if (successes == 0) e.wilson_ci_95.lo = 0.0;
    if (successes == trials) e.wilson_ci_95.hi = 1.0;
    return e;
}

SimulationResult simulate(const HypothesisPair& hp, const SchemeConfig& cfg, unsigned threads) {
    validate_common(hp, cfg);
    std::size_t xc = hp.p.card(0), yc = hp.p.card(1);
    double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(cfg.n, xc, yc);
    std::uint64_t bins = bin_count(cfg.n, cfg.rate);
    JointDistribution null_ref = canonical_null(hp.p);
    PairSampler sample_p(hp.p), sample_q(hp.q);
    PhaseSetup h0{&sample_p, &null_ref, kTagSampleH0};
    PhaseSetup h1{&sample_q, &null_ref, kTagSampleH1};

    std::vector<std::uint8_t> rejected(cfg.trials), accepted(cfg.trials), derr(cfg.trials);
    run_partitioned(cfg.trials, threads, [&](std::size_t t) {
        PhaseOutcome a = run_phase(h0, cfg.n, xc, yc, bins, delta, cfg.seed, t, 0);
        PhaseOutcome b = run_phase(h1, cfg.n, xc, yc, bins, delta, cfg.seed, t, 0);
        rejected[t] = !a.accepted;
        derr[t] = a.decode_error;
        accepted[t] = b.accepted;
    });

    std::size_t nrej = 0, nacc = 0, nerr = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        nrej += rejected[t];
        nacc += accepted[t];
        nerr += derr[t];
    }
    SimulationResult res;
    res.alpha = wilson_estimate(nrej, cfg.trials);
    res.beta = wilson_estimate(nacc, cfg.trials);
    res.trials = cfg.trials;
    res.decode_error_rate = static_cast<double>(nerr) / static_cast<double>(cfg.trials);
    return res;
}

SequentialSimulationResult simulate_sequential(const HypothesisPair& component1,
                                               const HypothesisPair& component2,
                                               const SchemeConfig& cfg, double rate1,
                                               double rate2, unsigned threads) {
    SchemeConfig c1 = cfg;
    c1.rate = rate1;
    SchemeConfig c2 = cfg;
    c2.rate = rate2;
    validate_common(component1, c1);
    validate_common(component2, c2);

    struct Component {
        const HypothesisPair* hp;
        std::size_t xc, yc;
        double delta;
        std::uint64_t bins;
        JointDistribution null_ref;
        PairSampler sp, sq;
    };
    auto make = [&](const HypothesisPair& hp, double rate) {
        return Component{&hp,
                         hp.p.card(0),
                         hp.p.card(1),
                         cfg.delta > 0.0 ? cfg.delta : default_delta(cfg.n, hp.p.card(0), hp.p.card(1)),
                         bin_count(cfg.n, rate),
                         canonical_null(hp.p),
                         PairSampler(hp.p),
                         PairSampler(hp.q)};
    };
    Component comp[2] = {make(component1, rate1), make(component2, rate2)};

    struct TrialRow {
        std::uint8_t rej[2], acc[2], derr[2];
        double h_type[2];
    };
    std::vector<TrialRow> rows(cfg.trials);
    run_partitioned(cfg.trials, threads, [&](std::size_t t) {
        TrialRow& row = rows[t];
        for (int k = 0; k < 2; ++k) {
            std::uint64_t off = static_cast<std::uint64_t>(k) * 16;
            PhaseSetup h0{&comp[k].sp, &comp[k].null_ref, kTagSampleH0};
            PhaseSetup h1{&comp[k].sq, &comp[k].null_ref, kTagSampleH1};
            PhaseOutcome a = run_phase(h0, cfg.n, comp[k].xc, comp[k].yc, comp[k].bins,
                                       comp[k].delta, cfg.seed, t, off);
            PhaseOutcome b = run_phase(h1, cfg.n, comp[k].xc, comp[k].yc, comp[k].bins,
                                       comp[k].delta, cfg.seed, t, off);
            row.rej[k] = !a.accepted;
            row.acc[k] = b.accepted;
            row.derr[k] = a.decode_error;
            double h = 0.0, n = static_cast<double>(cfg.n);
            for (std::size_t c : b.x_marginal_counts) {
                if (c > 0) {
                    double f = static_cast<double>(c) / n;
                    h -= f * std::log(f);
                }
            }
            row.h_type[k] = h;
        }
    });

    SequentialSimulationResult out;
    std::size_t comb_rej = 0, comb_acc = 0, comb_err = 0;
    std::size_t rej[2] = {0, 0}, acc[2] = {0, 0}, err[2] = {0, 0};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialRow& row = rows[t];
        for (int k = 0; k < 2; ++k) {
            rej[k] += row.rej[k];
            acc[k] += row.acc[k];
            err[k] += row.derr[k];
        }
        bool combined_accept_h1 = row.acc[0] && row.acc[1];
        comb_rej += row.rej[0] || row.rej[1];
        comb_acc += combined_accept_h1;
        comb_err += row.derr[0] || row.derr[1];
        if (combined_accept_h1)
            out.type2_type_entropies.emplace_back(row.h_type[0], row.h_type[1]);
    }
    for (int k = 0; k < 2; ++k) {
        out.components[k].alpha = wilson_estimate(rej[k], cfg.trials);
        out.components[k].beta = wilson_estimate(acc[k], cfg.trials);
        out.components[k].trials = cfg.trials;
        out.components[k].decode_error_rate =
            static_cast<double>(err[k]) / static_cast<double>(cfg.trials);
    }
    out.combined.alpha = wilson_estimate(comb_rej, cfg.trials);
    out.combined.beta = wilson_estimate(comb_acc, cfg.trials);
    out.combined.trials = cfg.trials;
    out.combined.decode_error_rate = static_cast<double>(comb_err) / static_cast<double>(cfg.trials);
    return out;
}

}  // namespace dht
