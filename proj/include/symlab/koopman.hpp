#pragma once

// Simple functions over the two measure rings, L_p norms, the Koopman group
// (U_t f)(x) = f(Phi_{-t} x), correlation tables for the strong-continuity
// question, and the phase-weighted eigenfunctions of the hyperbolic flow.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symlab/banach_limit.hpp"
#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/hyperbolic_measure.hpp"
#include "symlab/number.hpp"
#include "symlab/symplectic_measure.hpp"

namespace symlab {

/// Complex number with Number parts; exact when both parts are.
struct Coefficient {
    Number re{0};
    Number im{0};

    Coefficient() = default;
    Coefficient(Number r, Number i = Number(0)) : re(std::move(r)), im(std::move(i)) {}  // NOLINT

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    Number abs2() const { return re * re + im * im; }
    Coefficient conj() const { return {re, -im}; }
    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    /// |c|^p; exact for integer p when c is real or p is even.
    Number abs_pow(int p) const {
        if (im.is_zero()) return pow_int(abs(re), p);
        if (re.is_zero()) return pow_int(abs(im), p);
        if (p % 2 == 0) return pow_int(abs2(), p / 2);
        return Number::approx(std::pow(std::sqrt(abs2().to_double()), p));
    }

    friend Coefficient operator+(const Coefficient& a, const Coefficient& b) { return {a.re + b.re, a.im + b.im}; }
    friend Coefficient operator-(const Coefficient& a, const Coefficient& b) { return {a.re - b.re, a.im - b.im}; }
    friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    Coefficient operator-() const { return {-re, -im}; }
    friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.re == b.re && a.im == b.im; }

    std::string str() const { return im.is_zero() ? re.str() : "(" + re.str() + "," + im.str() + ")"; }
};

enum class SpaceTag { symplectic, hyperbolic };

template <class Ring>
constexpr SpaceTag space_tag_of() {
    if constexpr (std::is_same_v<Ring, HyperbolicRingSet>) return SpaceTag::hyperbolic;
    else return SpaceTag::symplectic;
}

/// Finite combination sum alpha_k chi_{A_k} with pairwise disjoint supports.
template <class Ring>
class SimpleFunction {
public:
    struct Term {
        Coefficient coefficient;
        Ring support;
    };

    SimpleFunction() = default;

    static SimpleFunction indicator(Ring support) {
        SimpleFunction f;
        f.add(Coefficient(Number(1)), std::move(support));
        return f;
    }

    static constexpr SpaceTag space() { return space_tag_of<Ring>(); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Adds c chi_S, refining the existing supports so they stay disjoint.
    void add(const Coefficient& c, const Ring& s) {
        if (c.is_zero() || s.measure().is_zero()) return;
        std::vector<Term> out;
        Ring rest = s;
        for (auto& t : terms_) {
            Ring overlap = intersect(t.support, s);
            if (overlap.measure().is_zero()) {
                out.push_back(std::move(t));
                continue;
            }
            Ring outside = subtract(t.support, s);
            rest = subtract(rest, t.support);
            if (!outside.measure().is_zero()) out.push_back({t.coefficient, std::move(outside)});
            Coefficient sum = t.coefficient + c;
            if (!sum.is_zero()) out.push_back({std::move(sum), std::move(overlap)});
        }
        if (!rest.measure().is_zero()) out.push_back({c, std::move(rest)});
        terms_ = std::move(out);
    }

    SimpleFunction scaled(const Coefficient& c) const {
        SimpleFunction f;
        if (c.is_zero()) return f;
        for (const auto& t : terms_) f.terms_.push_back({t.coefficient * c, t.support});
        return f;
    }

    template <class Fn>
    SimpleFunction with_supports(Fn&& map) const {
        SimpleFunction f;
        for (const auto& t : terms_) f.terms_.push_back({t.coefficient, map(t.support)});
        return f;
    }

    friend SimpleFunction operator+(const SimpleFunction& a, const SimpleFunction& b) {
        SimpleFunction f = a;
        for (const auto& t : b.terms_) f.add(t.coefficient, t.support);
        return f;
    }
    friend SimpleFunction operator-(const SimpleFunction& a, const SimpleFunction& b) {
        return a + b.scaled(Coefficient(Number(-1)));
    }

private:
    std::vector<Term> terms_;
};

using SymplecticFunction = SimpleFunction<RingSet>;
using HyperbolicFunction = SimpleFunction<HyperbolicRingSet>;

/// sum |alpha_k|^p mu(A_k) for integer p >= 1; exact where abs_pow is.
template <class Ring>
Number lp_norm_pow(const SimpleFunction<Ring>& f, int p) {
    if (p < 1) throw error("L_p norm requires p >= 1");
    Number s(0);
    for (const auto& t : f.terms()) s += t.coefficient.abs_pow(p) * t.support.measure();
    return s;
}

/// (sum |alpha_k|^p mu(A_k))^{1/p}; p = infinity gives the essential sup.
template <class Ring>
double lp_norm(const SimpleFunction<Ring>& f, double p) {
    if (!(p >= 1)) throw error("L_p norm requires p >= 1");
    if (std::isinf(p)) {
        double m = 0;
        for (const auto& t : f.terms()) {
            if (!t.support.measure().is_zero()) m = std::max(m, std::abs(t.coefficient.to_complex()));
        }
        return m;
    }
    if (p == std::floor(p) && p < 64) return std::pow(lp_norm_pow(f, static_cast<int>(p)).to_double(), 1.0 / p);
    double s = 0;
    for (const auto& t : f.terms()) s += std::pow(std::abs(t.coefficient.to_complex()), p) * t.support.measure().to_double();
    return std::pow(s, 1.0 / p);
}

/// sum_{i,j} alpha_i conj(beta_j) mu(A_i n B_j).
template <class Ring>
Coefficient inner_product(const SimpleFunction<Ring>& f, const SimpleFunction<Ring>& g) {
    Coefficient s;
    for (const auto& x : f.terms()) {
        for (const auto& y : g.terms()) {
            const Number m = intersect(x.support, y.support).measure();
            if (!m.is_zero()) s = s + x.coefficient * y.coefficient.conj() * Coefficient(m);
        }
    }
    return s;
}

using AnySimpleFunction = std::variant<SymplecticFunction, HyperbolicFunction>;

inline Coefficient inner_product(const AnySimpleFunction& f, const AnySimpleFunction& g) {
    if (f.index() != g.index()) throw space_mismatch("inner product of functions on different spaces");
    if (f.index() == 0) return inner_product(std::get<0>(f), std::get<0>(g));
    return inner_product(std::get<1>(f), std::get<1>(g));
}

/// f and g agree outside a null set.
template <class Ring>
bool equivalent(const SimpleFunction<Ring>& f, const SimpleFunction<Ring>& g) {
    return lp_norm_pow(f - g, 1).is_zero();
}

/// U_t f: each support is replaced by its image under Phi_t.
inline SymplecticFunction koopman_apply(const BlockFlow& flow, const Time& t, const SymplecticFunction& f) {
    if (t.is_zero()) return f;
    return f.with_supports([&](const RingSet& s) { return pushforward(s, flow, t); });
}

/// U_t f for the hyperbolic flow acting on action-angle blocks.
inline HyperbolicFunction koopman_apply(const FrequencySeq& a, const Time& t, const HyperbolicFunction& f) {
    if (t.is_zero()) return f;
    return f.with_supports([&](const HyperbolicRingSet& s) { return hyper_pushforward(s, a, t); });
}

// ---------------------------------------------------------------------------
// Correlations g(t) = (U_t chi_B, chi_B) / mu(B) on product bars

struct CorrelationRow {
    Time t;
    int n = 0;
    Number g;                    // prod_{k <= n} c_k(t)
    Number factor;               // c_n(t)
};

struct CorrelationTable {
    std::vector<CorrelationRow> rows;
    std::vector<std::vector<Number>> factors;  // factors[i][k-1] = c_k(ts[i])
};

/// c(t) = area(M B n B) / area(B) for one block map.
inline Number overlap_ratio(const PlaneSet& b, const AffineBlock& block) {
    const Number a = b.area();
    if (a.is_zero()) throw error("correlation needs a factor of positive area");
    const PlaneSet image = translate(linear_image(b, block.linear), block.offset);
    return intersect(image, b).area() / a;
}

/// Correlation of the bar with factor b on indices 1..max(ns) under `flow`.
inline CorrelationTable correlation_study(const BlockFlow& flow, const PlaneSet& b, const std::vector<Time>& ts,
                                          const std::vector<int>& ns) {
    int n_max = 0;
    for (int n : ns) {
        if (n < 1) throw error("truncation N must be positive");
        n_max = std::max(n_max, n);
    }
    CorrelationTable table;
    for (const auto& t : ts) {
        std::vector<Number> c;
        c.reserve(static_cast<std::size_t>(n_max));
        for (int k = 1; k <= n_max; ++k) {
            const AffineBlock blk = flow.block(k, t);
            c.push_back(blk.is_identity() ? Number(1) : overlap_ratio(b, blk));
        }
        for (int n : ns) {
            Number g(1);
            for (int k = 0; k < n; ++k) g *= c[static_cast<std::size_t>(k)];
            table.rows.push_back({t, n, g, c[static_cast<std::size_t>(n - 1)]});
        }
        table.factors.push_back(std::move(c));
    }
    return table;
}

struct BoundedValue {
    std::complex<double> value;
    double bound = 0;  // bound on |value|
};

/// e^{i a^2 t^2} sin(2 t a X) / (2 t a X); 1 at t = 0.
inline BoundedValue hyperbolic_correlation(double a, double t, double x) {
    if (!(x > 0)) throw error("window must be positive");
    if (t == 0 || a == 0) return {1.0, 1.0};
    const CesaroMean m = cesaro_mean_exponential(2 * t * a, x);
    return {std::polar(1.0, a * a * t * t) * m.value, 1.0 / std::abs(2 * t * a * x)};
}

// ---------------------------------------------------------------------------
// Non-separability witness

struct SeparationResult {
    Number norm_pow;   // ||chi_1 - chi_2||_p^p
    double distance;   // ||chi_1 - chi_2||_p
};

/// Bar with factor [s(i), s(i)+1) x [0, 1) at each index of s.
inline CylinderBar sigma_bar(const std::map<int, int>& sigma, const std::vector<int>& indices) {
    std::map<int, PlaneSet> f;
    for (int k : indices) {
        auto it = sigma.find(k);
        const int s = it == sigma.end() ? 0 : it->second;
        if (s != 0 && s != -1) throw error("sigma values must be -1 or 0");
        f.emplace(k, PlaneSet::rectangle(Number(s), Number(0), Number(s + 1), Number(1)));
    }
    return CylinderBar(std::move(f));
}

inline SeparationResult separation_witness(const std::map<int, int>& s1, const std::map<int, int>& s2, int p) {
    std::vector<int> idx;
    for (const auto& [k, v] : s1) idx.push_back(k);
    for (const auto& [k, v] : s2) {
        if (!s1.contains(k)) idx.push_back(k);
    }
    const auto f1 = SymplecticFunction::indicator(RingSet::from_bar(sigma_bar(s1, idx)));
    const auto f2 = SymplecticFunction::indicator(RingSet::from_bar(sigma_bar(s2, idx)));
    const Number np = lp_norm_pow(f1 - f2, p);
    return {np, std::pow(np.to_double(), 1.0 / p)};
}

// ---------------------------------------------------------------------------
// Eigenfunctions e^{i (m, phi)} g with radial g

struct EigenFunction {
    std::vector<Number> m;         // m_1..m_N
    HyperbolicFunction radial_profile;

    /// Every support must leave all angles unconstrained.
    void validate() const {
        for (const auto& t : radial_profile.terms()) {
            for (const auto& piece : t.support.pieces()) {
                auto check = [](const HyperbolicBar& b) {
                    for (const auto& [k, c] : b.active()) {
                        if (c.angle.density() != Number(1) || !c.angle.patch().is_empty()) {
                            throw error("radial profile constrains the angle of pair " + std::to_string(k));
                        }
                    }
                };
                check(piece.base());
                for (const auto& h : piece.holes()) check(h);
            }
        }
    }
};

struct EigenApplication {
    Number phase;                  // t sum_k m_k a_k
    std::complex<double> eigenvalue;
    bool profile_fixed = false;    // U_t g == g
    bool phase_consistent = false; // per-mode angle shifts reproduce the phase
};

/// U_t applied to e^{i (m, phi)} g: the profile is fixed and the phase factor
/// picks up exp(i t sum m_k a_k) from phi_k -> phi_k + a_k t.
inline EigenApplication eigen_apply(const FrequencySeq& a, const Time& t, const EigenFunction& ef) {
    ef.validate();
    Number ma(0);
    Number shifted(0);
    for (std::size_t i = 0; i < ef.m.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        ma += ef.m[i] * a(k);
        shifted += ef.m[i] * angle_shift(a, k, t);
    }
    const Number phase = t.unit() == Time::Unit::plain ? ma * t.multiplier() : Number::approx(ma.to_double() * t.value());
    EigenApplication out;
    out.phase = phase;
    out.eigenvalue = std::polar(1.0, phase.to_double());
    out.profile_fixed = equivalent(koopman_apply(a, t, ef.radial_profile), ef.radial_profile);
    out.phase_consistent = phase.is_exact() && shifted.is_exact()
                               ? phase == shifted
                               : std::abs(phase.to_double() - shifted.to_double()) <= 1e-12 * std::max(1.0, std::abs(phase.to_double()));
    return out;
}

struct OrthogonalityEstimate {
    std::complex<double> estimate;  // window-X inner product
    std::vector<double> factors;    // sin(dm_k X) / (dm_k X) for dm_k != 0
    double factor_bound = 1;        // prod 1 / (|dm_k| X)
    double bound = 0;               // |(g1, g2)| factor_bound
};

/// Inner product of two eigenfunctions with the angle integrals replaced by
/// window-X averages.
inline OrthogonalityEstimate eigen_orthogonality(const EigenFunction& e1, const EigenFunction& e2, double x) {
    if (!(x > 0)) throw error("window must be positive");
    const std::size_t n = std::max(e1.m.size(), e2.m.size());
    OrthogonalityEstimate out;
    std::complex<double> prod = 1.0;
    bool differ = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Number m1 = i < e1.m.size() ? e1.m[i] : Number(0);
        const Number m2 = i < e2.m.size() ? e2.m[i] : Number(0);
        const Number dm = m1 - m2;
        if (dm.is_zero()) continue;
        differ = true;
        const CesaroMean c = cesaro_mean_exponential(dm.to_double(), x);
        out.factors.push_back(c.value.real());
        prod *= c.value;
        out.factor_bound *= 1.0 / (std::abs(dm.to_double()) * x);
    }
    if (!differ) throw not_orthogonal("eigenfunctions share the mode vector m");
    const std::complex<double> radial = inner_product(e1.radial_profile, e2.radial_profile).to_complex();
    out.estimate = radial * prod;
    out.bound = std::abs(radial) * out.factor_bound;
    return out;
}

} // namespace symlab
