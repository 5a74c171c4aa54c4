#include "mmlp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmlp/errors.hpp"

namespace mmlp::search {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PLFunction::PLFunction(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
    if (points_.empty()) throw InvalidArgumentError("piecewise-linear function needs a point");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].first <= points_[i - 1].first)
            throw InvalidArgumentError("breakpoint abscissae must strictly increase");
}

double PLFunction::eval(double x) const {
    if (points_.size() == 1 || x <= points_.front().first) return points_.front().second;
    if (x >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    const double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

double PLFunction::min_on(double lo, double hi) const {
    double best = std::min(eval(lo), eval(hi));
    for (const auto& [x, y] : points_)
        if (x > lo && x < hi) best = std::min(best, y);
    return best;
}

PLFunction build_pl_approx(const std::function<double(std::uint64_t)>& exact_term,
                           std::uint64_t lo, std::uint64_t hi, unsigned n_breakpoints) {
    if (lo > hi) throw InvalidArgumentError("empty breakpoint domain");
    if (n_breakpoints < 2) n_breakpoints = 2;
    std::vector<std::uint64_t> xs;
    for (unsigned i = 0; i < n_breakpoints; ++i) {
        const double frac = static_cast<double>(i) / (n_breakpoints - 1);
        xs.push_back(lo + static_cast<std::uint64_t>(
                              std::llround(frac * static_cast<double>(hi - lo))));
    }
    xs.front() = lo;
    xs.back() = hi;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<std::pair<double, double>> pts;
    pts.reserve(xs.size());
    for (std::uint64_t x : xs) pts.emplace_back(static_cast<double>(x), exact_term(x));
    return PLFunction(std::move(pts));
}

namespace {

struct Candidate {
    double score;
    std::uint64_t body_literals;
    std::vector<std::size_t> subset; // ascending original rule indices

    bool operator<(const Candidate& o) const {
        return std::tie(score, body_literals, subset) < std::tie(o.score, o.body_literals, o.subset);
    }
};

class Searcher {
public:
    Searcher(const std::vector<Bitset>& pos_cov, const std::vector<Bitset>& neg_cov,
             const std::vector<std::uint32_t>& body_lits, const SurrogateObjective& obj,
             const SearchBudget& budget, std::size_t top_k)
        : pos_cov_(pos_cov), neg_cov_(neg_cov), lits_(body_lits), obj_(obj), budget_(budget),
          top_k_(std::max<std::size_t>(top_k, 1)), n_(pos_cov.size()),
          deadline_(std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(budget.solver_time_per_call))) {
        exhaustive_ = n_ <= budget.exhaustive_threshold;
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0);
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const auto gain = [&](std::size_t i) {
                return static_cast<std::int64_t>(pos_cov[i].count()) -
                       static_cast<std::int64_t>(neg_cov[i].count());
            };
            if (gain(a) != gain(b)) return gain(a) > gain(b);
            if (body_lits[a] != body_lits[b]) return body_lits[a] < body_lits[b];
            return a < b;
        });

        suffix_pos_.assign(n_ + 1, Bitset(pos_cov.empty() ? 0 : pos_cov[0].size()));
        suffix_neg_.assign(n_ + 1, Bitset(neg_cov.empty() ? 0 : neg_cov[0].size()));
        suffix_lits_.assign(n_ + 1, 0);
        for (std::size_t i = n_; i-- > 0;) {
            suffix_pos_[i] = suffix_pos_[i + 1] | pos_cov[order_[i]];
            suffix_neg_[i] = suffix_neg_[i + 1] | neg_cov[order_[i]];
            suffix_lits_[i] = suffix_lits_[i + 1] + body_lits[order_[i]];
        }
    }

    OptimizeResult run() {
        const std::size_t n_pos = pos_cov_.empty() ? 0 : pos_cov_[0].size();
        const std::size_t n_neg = neg_cov_.empty() ? 0 : neg_cov_[0].size();
        Bitset cov_pos(n_pos), cov_neg(n_neg);
        record(0, 0, 0, 0.0);
        dfs(0, cov_pos, cov_neg, 0, 0, 0, 0, 0.0);

        OptimizeResult res;
        res.nodes = nodes_;
        res.exhausted = !stopped_;
        res.incumbent_trace = std::move(trace_);

        std::sort(found_.begin(), found_.end());
        bool have_empty = false;
        for (const auto& c : found_)
            if (c.subset.empty()) have_empty = true;
        if (!have_empty) {
            found_.push_back(Candidate{obj_.eval(0, 0, 0, 0.0), 0, {}});
            std::sort(found_.begin(), found_.end());
        }
        for (auto& c : found_) {
            res.candidates.push_back(std::move(c.subset));
            res.scores.push_back(c.score);
        }
        return res;
    }

private:
    void record(std::uint64_t tp, std::uint64_t fp, std::uint64_t lits, double weight_sum) {
        const double score = obj_.eval(tp, fp, lits, weight_sum);
        Candidate cand{score, lits, current_};
        std::sort(cand.subset.begin(), cand.subset.end());
        if (found_.size() < top_k_) {
            found_.push_back(std::move(cand));
            if (found_.size() == top_k_)
                std::make_heap(found_.begin(), found_.end());
        } else if (cand < found_.front()) {
            std::pop_heap(found_.begin(), found_.end());
            found_.back() = std::move(cand);
            std::push_heap(found_.begin(), found_.end());
        }
        if (score < incumbent_) {
            incumbent_ = score;
            trace_.push_back(score);
        }
    }

    double worst_kept() const {
        if (found_.size() < top_k_) return kInf;
        return found_.front().score;
    }

    /// Explores the subtree rooted at idx. The exclude branch advances idx in
    /// place, so call-stack depth is bounded by the include count (max_rules),
    /// never by the pool size.
    void dfs(std::size_t idx, const Bitset& cov_pos, const Bitset& cov_neg, std::uint64_t tp,
             std::uint64_t fp, std::uint64_t lits, std::uint64_t count, double weight_sum) {
        while (!stopped_) {
            ++nodes_;
            if (!exhaustive_) {
                if (nodes_ >= budget_.max_nodes) {
                    stopped_ = true;
                    return;
                }
                if ((nodes_ & 0xFFF) == 0 && std::chrono::steady_clock::now() > deadline_) {
                    stopped_ = true;
                    return;
                }
            }
            if (idx == n_) return;

            if (!exhaustive_) {
                const std::uint64_t tp_max =
                    tp + suffix_pos_[idx].count() - suffix_pos_[idx].count_and(cov_pos);
                const std::uint64_t lits_max =
                    std::min<std::uint64_t>(lits + suffix_lits_[idx], obj_.max_body_literals);
                const double bound =
                    obj_.base + weight_sum +
                    obj_.g_tp.min_on(static_cast<double>(tp), static_cast<double>(tp_max)) +
                    obj_.g_fp.min_on(static_cast<double>(fp),
                                     static_cast<double>(fp + suffix_neg_[idx].count())) +
                    obj_.g_lits.min_on(static_cast<double>(lits), static_cast<double>(lits_max));
                if (bound >= worst_kept()) return;
            }

            const std::size_t rule = order_[idx];
            if (count + 1 <= obj_.max_rules && lits + lits_[rule] <= obj_.max_body_literals) {
                Bitset npos = cov_pos | pos_cov_[rule];
                Bitset nneg = cov_neg | neg_cov_[rule];
                const std::uint64_t ntp = npos.count();
                const std::uint64_t nfp = nneg.count();
                const std::uint64_t nlits = lits + lits_[rule];
                const double nweight = weight_sum + obj_.rule_weight[rule];
                current_.push_back(rule);
                record(ntp, nfp, nlits, nweight);
                dfs(idx + 1, npos, nneg, ntp, nfp, nlits, count + 1, nweight);
                current_.pop_back();
            }
            ++idx; // exclude branch
        }
    }

    const std::vector<Bitset>& pos_cov_;
    const std::vector<Bitset>& neg_cov_;
    const std::vector<std::uint32_t>& lits_;
    const SurrogateObjective& obj_;
    const SearchBudget& budget_;
    std::size_t top_k_;
    std::size_t n_;
    std::chrono::steady_clock::time_point deadline_;
    bool exhaustive_ = false;
    bool stopped_ = false;
    std::uint64_t nodes_ = 0;
    double incumbent_ = kInf;
    std::vector<std::size_t> order_;
    std::vector<Bitset> suffix_pos_, suffix_neg_;
    std::vector<std::uint64_t> suffix_lits_;
    std::vector<std::size_t> current_; // included original rule indices along the path
    std::vector<Candidate> found_;     // max-heap once full
    std::vector<double> trace_;
};

} // namespace

OptimizeResult optimize(const std::vector<Bitset>& pos_cov, const std::vector<Bitset>& neg_cov,
                        const std::vector<std::uint32_t>& body_lits,
                        const SurrogateObjective& objective, const SearchBudget& budget,
                        std::size_t top_k) {
    if (pos_cov.size() != neg_cov.size() || pos_cov.size() != body_lits.size() ||
        pos_cov.size() != objective.rule_weight.size())
        throw InvalidArgumentError("rule array sizes disagree");
    Searcher s(pos_cov, neg_cov, body_lits, objective, budget, top_k);
    return s.run();
}

SubsetCounts subset_counts(const std::vector<Bitset>& pos_cov, const std::vector<Bitset>& neg_cov,
                           const std::vector<std::uint32_t>& body_lits,
                           const std::vector<std::size_t>& subset) {
    SubsetCounts out;
    if (subset.empty()) return out;
    Bitset p = pos_cov[subset[0]];
    Bitset n = neg_cov[subset[0]];
    out.body_literals = body_lits[subset[0]];
    for (std::size_t i = 1; i < subset.size(); ++i) {
        p |= pos_cov[subset[i]];
        n |= neg_cov[subset[i]];
        out.body_literals += body_lits[subset[i]];
    }
    out.tp = p.count();
    out.fp = n.count();
    return out;
}

std::size_t rescore_exact(const std::vector<logic::Program>& candidates,
                          const std::function<double(const logic::Program&)>& exact_cost,
                          std::vector<double>* costs_out) {
    if (candidates.empty()) throw InvalidArgumentError("no candidates to rescore");
    std::size_t best = 0;
    double best_cost = exact_cost(candidates[0]);
    std::size_t best_lits = candidates[0].total_literals();
    std::string best_str = logic::to_string(candidates[0]);
    if (costs_out) costs_out->push_back(best_cost);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double c = exact_cost(candidates[i]);
        if (costs_out) costs_out->push_back(c);
        const std::size_t lits = candidates[i].total_literals();
        std::string str = logic::to_string(candidates[i]);
        const bool tie = std::abs(c - best_cost) <= 1e-9;
        const bool better =
            (!tie && c < best_cost) ||
            (tie && (lits < best_lits || (lits == best_lits && str < best_str)));
        if (better) {
            best = i;
            best_cost = c;
            best_lits = lits;
            best_str = std::move(str);
        }
    }
    return best;
}

} // namespace mmlp::search
