#include "cklab/exponents.hpp"

#include "cklab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace cklab {

namespace {

constexpr double kApproxTol = 1e-12;

// Finite value that stays rational as long as every operand is.
struct Num {
    std::optional<Rational> exact;
    double approx = 0.0;

    static Num of(const Exponent& e) {
        if (e.is_infinite()) throw std::logic_error("Num: infinite operand");
        if (e.rational()) return {e.rational(), e.rational()->to_double()};
        return {std::nullopt, e.value()};
    }
    static Num of(Rational r) { return {r, r.to_double()}; }
    [[nodiscard]] double value() const { return exact ? exact->to_double() : approx; }
    [[nodiscard]] Exponent to_exponent() const { return exact ? Exponent::exact(*exact) : Exponent::approx(approx); }
};

Num operator+(const Num& a, const Num& b) {
    if (a.exact && b.exact) return Num::of(*a.exact + *b.exact);
    return {std::nullopt, a.value() + b.value()};
}
Num operator-(const Num& a, const Num& b) {
    if (a.exact && b.exact) return Num::of(*a.exact - *b.exact);
    return {std::nullopt, a.value() - b.value()};
}
Num operator*(const Num& a, const Num& b) {
    if (a.exact && b.exact) return Num::of(*a.exact * *b.exact);
    return {std::nullopt, a.value() * b.value()};
}

// Sign of a residual: exact when possible, otherwise with the 1e-12 band
// counted as zero.
int sign_of(const Num& r) {
    if (r.exact) return r.exact->num() > 0 ? 1 : (r.exact->num() < 0 ? -1 : 0);
    if (std::abs(r.approx) <= kApproxTol) return 0;
    return r.approx > 0 ? 1 : -1;
}

Num half() { return Num::of(Rational(1, 2)); }
Num integer(int v) { return Num::of(Rational(v)); }

}  // namespace

Exponent Exponent::infinite() {
    Exponent e;
    e.infinite_ = true;
    return e;
}

Exponent Exponent::exact(Rational r) {
    Exponent e;
    e.exact_ = r;
    e.approx_ = r.to_double();
    return e;
}

Exponent Exponent::approx(double v) {
    if (std::isinf(v) && v > 0) return infinite();
    Exponent e;
    e.approx_ = v;
    return e;
}

std::optional<Exponent> Exponent::parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "Inf" || text == "oo") return infinite();
    if (auto r = Rational::parse(text)) return exact(*r);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || std::isnan(v)) return std::nullopt;
    return approx(v);
}

double Exponent::value() const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    return exact_ ? exact_->to_double() : approx_;
}

Exponent Exponent::reciprocal() const {
    if (infinite_) return exact(Rational(0));
    if (exact_) {
        if (exact_->is_zero()) return infinite();
        return exact(Rational(1) / *exact_);
    }
    if (approx_ == 0.0) return infinite();
    return approx(1.0 / approx_);
}

std::string Exponent::str() const {
    if (infinite_) return "inf";
    if (exact_) return exact_->str();
    std::ostringstream os;
    os.precision(17);
    os << approx_;
    return os.str();
}

std::string to_string(Relation r) {
    switch (r) {
    case Relation::Range: return "range";
    case Relation::Scaling: return "scaling";
    case Relation::Knapp: return "knapp";
    }
    return "unknown";
}

std::string Verdict::describe() const {
    if (admissible) return "admissible";
    std::ostringstream os;
    os.precision(17);
    switch (violated) {
    case Relation::Range: os << "violation(range: need p >= 2 and 2 <= q < inf)"; break;
    case Relation::Scaling: os << "violation(scaling 1/p + n/q = n/2 - s, residual " << residual << ")"; break;
    case Relation::Knapp: os << "violation(knapp 2/p + (n-1)/q <= (n-1)/2, excess " << residual << ")"; break;
    }
    return os.str();
}

Verdict validate(const Exponent& p, const Exponent& q, const Exponent& s, int n) {
    Verdict v;
    v.degenerate_dimension = (n == 1);
    v.exact = (p.is_infinite() || p.rational()) && (q.is_infinite() || q.rational()) && s.rational().has_value();
    if (s.is_infinite() || n < 1 || q.is_infinite() || q.value() < 2.0 || p.value() < 2.0) {
        v.violated = Relation::Range;
        v.residual = std::numeric_limits<double>::infinity();
        return v;
    }
    const Num inv_p = Num::of(p.reciprocal());
    const Num inv_q = Num::of(q.reciprocal());
    const Num nn = integer(n);
    const Num scaling = inv_p + nn * inv_q - (nn * half() - Num::of(s));
    if (sign_of(scaling) != 0) {
        v.violated = Relation::Scaling;
        v.residual = scaling.value();
        return v;
    }
    const Num knapp = integer(2) * inv_p + integer(n - 1) * inv_q - integer(n - 1) * half();
    if (sign_of(knapp) > 0) {
        v.violated = Relation::Knapp;
        v.residual = knapp.value();
        return v;
    }
    v.admissible = true;
    return v;
}

AdmissibleTriple AdmissibleTriple::make(Exponent p, Exponent q, Exponent s, int n) {
    const Verdict v = validate(p, q, s, n);
    if (!v.admissible) {
        throw ConfigError("exponents (" + p.str() + "," + q.str() + "," + s.str() + ") with n=" + std::to_string(n) +
                          " are not admissible: " + v.describe());
    }
    return AdmissibleTriple{p, q, s, n};
}

std::string AdmissibleTriple::key() const { return p.str() + "," + q.str() + "," + s.str(); }

std::string DualPair::key() const { return p_prime.str() + "," + q_prime.str(); }

namespace {

Num dual_residual_num(const Exponent& p_prime, const Exponent& q_prime, const Exponent& s, int n) {
    const Num nn = integer(n);
    return Num::of(p_prime.reciprocal()) + nn * Num::of(q_prime.reciprocal()) - integer(2) - (nn * half() - Num::of(s));
}

// Conjugate exponent a' -> a = a'/(a'-1), with 1 -> inf.
Exponent conjugate_of(const Exponent& prime) {
    const Num a = Num::of(prime);
    const Num denom = a - integer(1);
    if (denom.exact) {
        if (denom.exact->is_zero()) return Exponent::infinite();
        return Exponent::exact(*a.exact / *denom.exact);
    }
    if (denom.approx == 0.0) return Exponent::infinite();
    return Exponent::approx(a.approx / denom.approx);
}

}  // namespace

double dual_relation_residual(const Exponent& p_prime, const Exponent& q_prime, const Exponent& s, int n) {
    return dual_residual_num(p_prime, q_prime, s, n).value();
}

DualPair make_dual(Exponent p_prime, Exponent q_prime, Exponent s, int n) {
    if (p_prime.is_infinite() || q_prime.is_infinite() || p_prime.value() < 1.0 || p_prime.value() > 2.0 ||
        q_prime.value() <= 1.0 || q_prime.value() > 2.0) {
        throw ConfigError("dual pair (" + p_prime.str() + "," + q_prime.str() + ") outside p' in [1,2], q' in (1,2]");
    }
    const Num residual = dual_residual_num(p_prime, q_prime, s, n);
    if (sign_of(residual) != 0) {
        std::ostringstream os;
        os.precision(17);
        os << "dual pair (" << p_prime.str() << "," << q_prime.str() << ") violates 1/p' + n/q' - 2 = n/2 - s, residual "
           << residual.value();
        throw ConfigError(os.str());
    }
    const Exponent p_tilde = conjugate_of(p_prime);
    const Exponent q_tilde = conjugate_of(q_prime);
    const Num nn = integer(n);
    const Num s_tilde = nn * half() - Num::of(p_tilde.reciprocal()) - nn * Num::of(q_tilde.reciprocal());
    const Verdict v = validate(p_tilde, q_tilde, s_tilde.to_exponent(), n);
    if (!v.admissible) {
        throw ConfigError("conjugate triple (" + p_tilde.str() + "," + q_tilde.str() + "," + s_tilde.to_exponent().str() +
                          ") is not admissible: " + v.describe());
    }
    return DualPair{p_prime, q_prime, s, n, p_tilde, q_tilde, s_tilde.to_exponent()};
}

std::vector<DualPair> dual_for(const Rational& s, int n, int max_den) {
    std::vector<DualPair> out;
    std::vector<Rational> lattice;
    for (int den = 1; den <= max_den; ++den) {
        for (int num = den; num <= 2 * den; ++num) {
            const Rational r(num, den);
            if (r.den() == den) lattice.push_back(r);  // reduced form only once
        }
    }
    std::sort(lattice.begin(), lattice.end());
    for (const Rational& pp : lattice) {
        // q' from the relation: n/q' = n/2 - s + 2 - 1/p'
        const Rational rhs = Rational(n, 2) - s + Rational(2) - Rational(1) / pp;
        if (rhs.num() <= 0) continue;
        const Rational qp = Rational(n) / rhs;
        if (qp <= Rational(1) || qp > Rational(2) || qp.den() > max_den) continue;
        try {
            out.push_back(make_dual(pp, qp, s, n));
        } catch (const ConfigError&) {
            // conjugate not admissible: not part of the family
        }
    }
    return out;
}

namespace {

WeightExponents weights_for(const Exponent& p, const Exponent& s, int n) {
    WeightExponents w;
    w.measure_power = n;
    if (p.is_infinite()) return w;
    const Num pp = Num::of(p);
    const Num ss = Num::of(s);
    w.t_weight = (pp * (ss - half())).to_exponent();
    w.x_weight = (pp * (half() - ss) - integer(1)).to_exponent();
    return w;
}

}  // namespace

WeightExponents weight_exponents(const AdmissibleTriple& triple) { return weights_for(triple.p, triple.s, triple.n); }

WeightExponents weight_exponents(const DualPair& dual) { return weights_for(dual.p_prime, dual.s, dual.n); }

}  // namespace cklab
