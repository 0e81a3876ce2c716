#pragma once

#include "cklab/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cklab {

/// Extended-real exponent. Rational inputs are kept exact so that the
/// admissibility relations are decided without rounding; p = infinity is
/// explicit (1/p = 0).
class Exponent {
public:
    static Exponent infinite();
    static Exponent exact(Rational r);
    static Exponent approx(double v);
    /// "inf", an integer, "a/b", or a decimal are exact; anything else that
    /// parses as a double is kept approximate.
    static std::optional<Exponent> parse(std::string_view text);

    Exponent(std::int64_t v) : Exponent(exact(Rational(v))) {}  // NOLINT(implicit)
    Exponent(Rational r) : Exponent(exact(r)) {}                 // NOLINT(implicit)

    [[nodiscard]] bool is_infinite() const { return infinite_; }
    [[nodiscard]] const std::optional<Rational>& rational() const { return exact_; }
    [[nodiscard]] double value() const;
    /// 1/p, with 1/inf = 0.
    [[nodiscard]] Exponent reciprocal() const;
    [[nodiscard]] std::string str() const;

private:
    Exponent() = default;
    bool infinite_ = false;
    std::optional<Rational> exact_;
    double approx_ = 0.0;
};

enum class Relation { Range, Scaling, Knapp };

[[nodiscard]] std::string to_string(Relation r);

struct Verdict {
    bool admissible = false;
    Relation violated = Relation::Range;  // meaningful only when !admissible
    double residual = 0.0;                // signed residual of the violated relation
    bool exact = true;                    // decided in rational arithmetic
    bool degenerate_dimension = false;    // n == 1: only p = inf can satisfy the Knapp bound

    [[nodiscard]] std::string describe() const;
};

/// Checks 1/p + n/q = n/2 - s and 2/p + (n-1)/q <= (n-1)/2, plus the range
/// p >= 2, 2 <= q < inf. Exact when every input is rational, otherwise the
/// equality is tested to 1e-12.
[[nodiscard]] Verdict validate(const Exponent& p, const Exponent& q, const Exponent& s, int n);

struct AdmissibleTriple {
    Exponent p;
    Exponent q;
    Exponent s;
    int n;

    /// Throws ConfigError naming the violated relation.
    static AdmissibleTriple make(Exponent p, Exponent q, Exponent s, int n);
    [[nodiscard]] std::string key() const;  // "p,q,s"
};

/// Conjugate-side exponents (p~', q~') for the inhomogeneous estimate together
/// with the admissible triple (p~, q~, s~) they come from.
struct DualPair {
    Exponent p_prime;
    Exponent q_prime;
    Exponent s;
    int n;
    Exponent p_tilde;
    Exponent q_tilde;
    Exponent s_tilde;

    [[nodiscard]] std::string key() const;
};

/// Residual of 1/p' + n/q' - 2 - (n/2 - s); zero for a valid pair.
[[nodiscard]] double dual_relation_residual(const Exponent& p_prime, const Exponent& q_prime, const Exponent& s, int n);

/// Builds a single dual pair, throwing ConfigError if the defining relation
/// fails or the conjugate triple is not admissible.
[[nodiscard]] DualPair make_dual(Exponent p_prime, Exponent q_prime, Exponent s, int n);

/// Enumerates lattice points p' in [1,2], q' in (1,2] with denominators up to
/// max_den that satisfy the dual relation and whose conjugates are admissible.
[[nodiscard]] std::vector<DualPair> dual_for(const Rational& s, int n, int max_den = 12);

struct WeightExponents {
    std::optional<Exponent> t_weight;  // p(s - 1/2); empty for p = inf
    std::optional<Exponent> x_weight;  // p(1/2 - s) - 1; empty for p = inf
    int measure_power = 0;             // n, for e^{n|t|} dh = dh / x^n
};

[[nodiscard]] WeightExponents weight_exponents(const AdmissibleTriple& triple);
/// Same weights for the forcing norm: p'(s - 1/2) and p'(1/2 - s) - 1.
[[nodiscard]] WeightExponents weight_exponents(const DualPair& dual);

}  // namespace cklab
