#pragma once

#include <span>
#include <string>
#include <vector>

namespace orcafl::fis {

/// Triangular membership function with left foot a, apex b, right foot c.
/// Degenerate a == b or b == c gives a shoulder: membership stays 1 beyond
/// the apex on the degenerate side.
struct TriangularMF {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool operator==(const TriangularMF&) const = default;
};

/// Piecewise-linear evaluation of a triangular membership function in [0, 1].
double trimf_eval(double x, const TriangularMF& mf);

struct FuzzyTerm {
    std::string label;
    TriangularMF mf;

    bool operator==(const FuzzyTerm&) const = default;
};

/// A linguistic variable: named universe interval plus an ordered term set.
///
/// Construction validates a <= b <= c per term and coverage: every universe
/// point must activate at least one term. Points where only a foot of an MF
/// touches the universe edge (zero exactly at the endpoint, positive just
/// inside) count as covered in the limit; fuzzify nudges clamped inputs off
/// such endpoints so that some term always fires.
class FuzzyVariable {
public:
    FuzzyVariable(std::string name, double lo, double hi, std::vector<FuzzyTerm> terms);

    const std::string& name() const { return name_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<FuzzyTerm>& terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }

    /// Index of the term with the given label, or -1.
    int term_index(std::string_view label) const;

    /// Clamps x into the universe, nudging off uncovered endpoints.
    double clamp(double x) const;

    /// Membership of the clamped input per term; at least one entry > 0.
    void fuzzify_into(double x, std::span<double> out) const;
    std::vector<double> fuzzify(double x) const;

    bool operator==(const FuzzyVariable&) const = default;

private:
    std::string name_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<FuzzyTerm> terms_;
    double clamp_lo_ = 0.0;  // universe bounds pulled inward where coverage
    double clamp_hi_ = 0.0;  // is only attained in the limit
};

/// Conjunctive rule: one antecedent term index per input variable, one
/// consequent term index on the output variable.
struct FuzzyRule {
    std::vector<int> antecedent;
    int consequent = 0;

    bool operator==(const FuzzyRule&) const = default;
};

/// Aggregated output membership sampled uniformly on [lo, hi].
struct SampledMembership {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> mu;

    double dx() const { return mu.size() > 1 ? (hi - lo) / double(mu.size() - 1) : 0.0; }
    double x_at(std::size_t i) const { return lo + double(i) * dx(); }
};

/// Centroid of a sampled membership function: sum(x * mu) / sum(mu).
/// Throws std::domain_error on a zero-mass aggregate.
double defuzz_centroid(const SampledMembership& agg);

/// Mamdani Type-I inference system: min t-norm for rule firing, min
/// implication (clipping), max aggregation, centroid defuzzification over a
/// uniform grid spanning the hull of the output-term supports.
///
/// Immutable after construction; evaluation is pure and thread-safe.
class FuzzyInferenceSystem {
public:
    FuzzyInferenceSystem(std::vector<FuzzyVariable> inputs, FuzzyVariable output,
                         std::vector<FuzzyRule> rules, int defuzz_resolution = 1001);

    const std::vector<FuzzyVariable>& inputs() const { return inputs_; }
    const FuzzyVariable& output() const { return output_; }
    const std::vector<FuzzyRule>& rules() const { return rules_; }
    int defuzz_resolution() const { return defuzz_resolution_; }

    /// Grid bounds: hull of the output-term supports.
    double grid_lo() const { return grid_lo_; }
    double grid_hi() const { return grid_hi_; }

    /// Rule firing strengths (min over antecedent memberships) for the given
    /// crisp inputs, one per rule.
    void firing_strengths(std::span<const double> crisp, std::span<double> alphas) const;

    /// Aggregated output membership for the crisp inputs.
    SampledMembership infer(std::span<const double> crisp) const;
    SampledMembership infer(std::initializer_list<double> crisp) const {
        return infer(std::span<const double>(crisp.begin(), crisp.size()));
    }

    /// clamp -> fuzzify -> infer -> centroid.
    double evaluate(std::span<const double> crisp) const;
    double evaluate(std::initializer_list<double> crisp) const;

    /// Evaluate with per-rule consequent overrides (one output-term index per
    /// rule); used by the Q-learning tuner while exploring conclusions.
    double evaluate_with_consequents(std::span<const double> crisp,
                                     std::span<const int> consequents) const;

    /// Index of the rule with exactly this antecedent, or -1.
    int find_rule(std::span<const int> antecedent) const;

    bool operator==(const FuzzyInferenceSystem&) const = default;

private:
    // Max clip level per output term; returns the rule count that fired.
    void clip_levels(std::span<const double> crisp, std::span<const int> consequents,
                     std::span<double> clips) const;
    double centroid_of_clips(std::span<const double> clips) const;
    void aggregate_into(std::span<const double> clips, std::span<double> mu) const;

    std::vector<FuzzyVariable> inputs_;
    FuzzyVariable output_;
    std::vector<FuzzyRule> rules_;
    int defuzz_resolution_ = 1001;
    double grid_lo_ = 0.0;
    double grid_hi_ = 0.0;
};

}  // namespace orcafl::fis
