#include "orcafl/fis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orcafl::fis {

double trimf_eval(double x, const TriangularMF& mf) {
    if (x <= mf.a) {
        return mf.a == mf.b ? 1.0 : 0.0;  // left shoulder when degenerate
    }
    if (x >= mf.c) {
        return mf.b == mf.c ? 1.0 : 0.0;  // right shoulder when degenerate
    }
    if (x == mf.b) {
        return 1.0;
    }
    if (x < mf.b) {
        return (x - mf.a) / (mf.b - mf.a);
    }
    return (mf.c - x) / (mf.c - mf.b);
}

namespace {

double max_membership(const std::vector<FuzzyTerm>& terms, double x) {
    double best = 0.0;
    for (const auto& t : terms) {
        best = std::max(best, trimf_eval(x, t.mf));
    }
    return best;
}

}  // namespace

FuzzyVariable::FuzzyVariable(std::string name, double lo, double hi,
                             std::vector<FuzzyTerm> terms)
    : name_(std::move(name)), lo_(lo), hi_(hi), terms_(std::move(terms)) {
    if (!(std::isfinite(lo_) && std::isfinite(hi_)) || lo_ >= hi_) {
        throw std::invalid_argument("FuzzyVariable '" + name_ + "': bad universe");
    }
    if (terms_.size() < 2) {
        throw std::invalid_argument("FuzzyVariable '" + name_ + "': needs >= 2 terms");
    }
    for (const auto& t : terms_) {
        if (!(t.mf.a <= t.mf.b && t.mf.b <= t.mf.c)) {
            throw std::invalid_argument("FuzzyVariable '" + name_ + "': term '" + t.label +
                                        "' violates a <= b <= c");
        }
    }

    // Coverage: membership must be positive everywhere on the universe. The
    // memberships are piecewise linear, so positivity at all breakpoints and
    // segment midpoints implies positivity on the segments between them.
    // Universe endpoints where only an MF foot lands are covered in the
    // limit; the clamp range is pulled a hair inside such endpoints.
    const double span = hi_ - lo_;
    const double eps = 1e-9 * span;
    std::vector<double> probes{lo_ + eps, hi_ - eps};
    for (const auto& t : terms_) {
        for (double b : {t.mf.a, t.mf.b, t.mf.c}) {
            if (b > lo_ && b < hi_) {
                probes.push_back(b);
            }
        }
    }
    std::sort(probes.begin(), probes.end());
    std::vector<double> grid = probes;
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
        grid.push_back(0.5 * (probes[i] + probes[i + 1]));
    }
    for (double x : grid) {
        if (max_membership(terms_, x) <= 0.0) {
            throw std::invalid_argument("FuzzyVariable '" + name_ +
                                        "': universe not covered near x=" + std::to_string(x));
        }
    }
    clamp_lo_ = max_membership(terms_, lo_) > 0.0 ? lo_ : lo_ + eps;
    clamp_hi_ = max_membership(terms_, hi_) > 0.0 ? hi_ : hi_ - eps;
}

int FuzzyVariable::term_index(std::string_view label) const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].label == label) {
            return int(i);
        }
    }
    return -1;
}

double FuzzyVariable::clamp(double x) const {
    if (std::isnan(x)) {
        throw std::invalid_argument("FuzzyVariable '" + name_ + "': NaN input");
    }
    return std::clamp(x, clamp_lo_, clamp_hi_);
}

void FuzzyVariable::fuzzify_into(double x, std::span<double> out) const {
    const double xc = clamp(x);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        out[i] = trimf_eval(xc, terms_[i].mf);
    }
}

std::vector<double> FuzzyVariable::fuzzify(double x) const {
    std::vector<double> out(terms_.size());
    fuzzify_into(x, out);
    return out;
}

double defuzz_centroid(const SampledMembership& agg) {
    double num = 0.0;
    double den = 0.0;
    const double dx = agg.dx();
    for (std::size_t i = 0; i < agg.mu.size(); ++i) {
        num += (agg.lo + double(i) * dx) * agg.mu[i];
        den += agg.mu[i];
    }
    if (den <= 0.0) {
        throw std::domain_error("defuzz_centroid: zero-mass aggregate");
    }
    return num / den;
}

FuzzyInferenceSystem::FuzzyInferenceSystem(std::vector<FuzzyVariable> inputs,
                                           FuzzyVariable output,
                                           std::vector<FuzzyRule> rules,
                                           int defuzz_resolution)
    : inputs_(std::move(inputs)),
      output_(std::move(output)),
      rules_(std::move(rules)),
      defuzz_resolution_(defuzz_resolution) {
    if (inputs_.empty() || inputs_.size() > 8) {
        throw std::invalid_argument("FuzzyInferenceSystem: needs 1..8 inputs");
    }
    for (const auto& in : inputs_) {
        if (in.num_terms() > 8) {
            throw std::invalid_argument("FuzzyInferenceSystem: input '" + in.name() +
                                        "' exceeds 8 terms");
        }
    }
    if (output_.num_terms() > 16) {
        throw std::invalid_argument("FuzzyInferenceSystem: output exceeds 16 terms");
    }
    if (rules_.empty()) {
        throw std::invalid_argument(
            "FuzzyInferenceSystem: empty rule base cannot cover any input");
    }
    if (defuzz_resolution_ < 2) {
        throw std::invalid_argument("FuzzyInferenceSystem: resolution must be >= 2");
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const auto& rule = rules_[r];
        if (rule.antecedent.size() != inputs_.size()) {
            throw std::invalid_argument("rule " + std::to_string(r) +
                                        ": antecedent arity mismatch");
        }
        for (std::size_t k = 0; k < inputs_.size(); ++k) {
            if (rule.antecedent[k] < 0 ||
                rule.antecedent[k] >= int(inputs_[k].num_terms())) {
                throw std::invalid_argument("rule " + std::to_string(r) +
                                            ": antecedent index out of range");
            }
        }
        if (rule.consequent < 0 || rule.consequent >= int(output_.num_terms())) {
            throw std::invalid_argument("rule " + std::to_string(r) +
                                        ": consequent index out of range");
        }
    }
    grid_lo_ = std::numeric_limits<double>::infinity();
    grid_hi_ = -std::numeric_limits<double>::infinity();
    for (const auto& t : output_.terms()) {
        grid_lo_ = std::min(grid_lo_, t.mf.a);
        grid_hi_ = std::max(grid_hi_, t.mf.c);
    }
}

void FuzzyInferenceSystem::firing_strengths(std::span<const double> crisp,
                                            std::span<double> alphas) const {
    if (crisp.size() != inputs_.size()) {
        throw std::invalid_argument("firing_strengths: one crisp value per input required");
    }
    // Memberships per input variable (<= 8 terms each in practice).
    double mem[8][8];
    for (std::size_t k = 0; k < inputs_.size(); ++k) {
        inputs_[k].fuzzify_into(crisp[k], std::span<double>(mem[k], inputs_[k].num_terms()));
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        double alpha = 1.0;
        for (std::size_t k = 0; k < inputs_.size(); ++k) {
            alpha = std::min(alpha, mem[k][rules_[r].antecedent[k]]);
            if (alpha == 0.0) {
                break;
            }
        }
        alphas[r] = alpha;
    }
}

void FuzzyInferenceSystem::clip_levels(std::span<const double> crisp,
                                       std::span<const int> consequents,
                                       std::span<double> clips) const {
    std::fill(clips.begin(), clips.end(), 0.0);
    thread_local std::vector<double> alphas;
    alphas.resize(rules_.size());
    firing_strengths(crisp, alphas);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const int c = consequents.empty() ? rules_[r].consequent : consequents[r];
        clips[c] = std::max(clips[c], alphas[r]);
    }
}

void FuzzyInferenceSystem::aggregate_into(std::span<const double> clips,
                                          std::span<double> mu) const {
    std::fill(mu.begin(), mu.end(), 0.0);
    const int n = int(mu.size());
    const double dx = (grid_hi_ - grid_lo_) / double(n - 1);
    for (std::size_t t = 0; t < output_.num_terms(); ++t) {
        const double clip = clips[t];
        if (clip <= 0.0) {
            continue;
        }
        const auto& mf = output_.terms()[t].mf;
        // Only the support of this term can contribute.
        int i0 = std::max(0, int(std::floor((mf.a - grid_lo_) / dx)));
        int i1 = std::min(n - 1, int(std::ceil((mf.c - grid_lo_) / dx)));
        if (mf.a == mf.b) {
            i0 = 0;  // left shoulder extends to the grid edge
        }
        if (mf.b == mf.c) {
            i1 = n - 1;
        }
        for (int i = i0; i <= i1; ++i) {
            const double v = std::min(clip, trimf_eval(grid_lo_ + double(i) * dx, mf));
            if (v > mu[std::size_t(i)]) {
                mu[std::size_t(i)] = v;
            }
        }
    }
}

SampledMembership FuzzyInferenceSystem::infer(std::span<const double> crisp) const {
    std::vector<double> clips(output_.num_terms());
    clip_levels(crisp, {}, clips);
    SampledMembership agg;
    agg.lo = grid_lo_;
    agg.hi = grid_hi_;
    agg.mu.resize(std::size_t(defuzz_resolution_));
    aggregate_into(clips, agg.mu);
    return agg;
}

double FuzzyInferenceSystem::centroid_of_clips(std::span<const double> clips) const {
    thread_local std::vector<double> mu;
    mu.resize(std::size_t(defuzz_resolution_));
    aggregate_into(clips, mu);
    double num = 0.0;
    double den = 0.0;
    const double dx = (grid_hi_ - grid_lo_) / double(defuzz_resolution_ - 1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        num += (grid_lo_ + double(i) * dx) * mu[i];
        den += mu[i];
    }
    if (den <= 0.0) {
        // Unreachable for full-product rule bases over covered variables;
        // possible for sparse parsed rule bases.
        throw std::runtime_error("FuzzyInferenceSystem: no rule fired (zero-mass aggregate)");
    }
    return num / den;
}

double FuzzyInferenceSystem::evaluate(std::span<const double> crisp) const {
    double clips_buf[16];
    std::span<double> clips(clips_buf, output_.num_terms());
    clip_levels(crisp, {}, clips);
    return centroid_of_clips(clips);
}

double FuzzyInferenceSystem::evaluate(std::initializer_list<double> crisp) const {
    return evaluate(std::span<const double>(crisp.begin(), crisp.size()));
}

double FuzzyInferenceSystem::evaluate_with_consequents(
    std::span<const double> crisp, std::span<const int> consequents) const {
    if (consequents.size() != rules_.size()) {
        throw std::invalid_argument("evaluate_with_consequents: one consequent per rule");
    }
    double clips_buf[16];
    std::span<double> clips(clips_buf, output_.num_terms());
    clip_levels(crisp, consequents, clips);
    return centroid_of_clips(clips);
}

int FuzzyInferenceSystem::find_rule(std::span<const int> antecedent) const {
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        if (std::equal(antecedent.begin(), antecedent.end(), rules_[r].antecedent.begin(),
                       rules_[r].antecedent.end())) {
            return int(r);
        }
    }
    return -1;
}

}  // namespace orcafl::fis
