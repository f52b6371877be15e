#pragma once

// Block Hamiltonian flows on the phase space of sequence pairs (q_k, p_k),
// k = 1, 2, ...: translations, harmonic and hyperbolic oscillators, and
// custom per-index symplectic maps. Each flow acts on the k-th plane through
// an affine map with a determinant-one linear part.
//
// Infinite vectors are represented by a finite head plus a parametric tail
// envelope. Everything that needs a genuinely infinite computation (existence
// intervals, energy series, the pseudosymplectic pairing) is decided by
// closed-form series tests on the envelope and frequency forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/number.hpp"

namespace symlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Frequency sequences a_k

class FrequencySeq {
public:
    struct Finite { std::vector<Number> values; };          // a_1..a_n, then 0
    struct Constant { Number c; };                          // a_k = c
    struct Linear { Number c; };                            // a_k = c k
    struct Geometric { Number c; Number ratio; };           // a_k = c ratio^k
    struct Power { Number c; Number exponent; };            // a_k = c k^s
    using Form = std::variant<Finite, Constant, Linear, Geometric, Power>;

    enum class Growth { bounded, sublinear, linear, superlinear };

    FrequencySeq() : form_(Finite{}) {}
    explicit FrequencySeq(Form f) : form_(std::move(f)) {}

    static FrequencySeq finite(std::vector<Number> v) { return FrequencySeq(Finite{std::move(v)}); }
    static FrequencySeq constant(Number c) { return FrequencySeq(Constant{std::move(c)}); }
    static FrequencySeq linear(Number c) { return FrequencySeq(Linear{std::move(c)}); }
    static FrequencySeq geometric(Number c, Number r) { return FrequencySeq(Geometric{std::move(c), std::move(r)}); }
    static FrequencySeq power(Number c, Number s) { return FrequencySeq(Power{std::move(c), std::move(s)}); }

    const Form& form() const { return form_; }

    /// a_k for k >= 1.
    Number operator()(int k) const {
        return std::visit([k](const auto& f) -> Number {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Finite>) {
                return k >= 1 && static_cast<std::size_t>(k) <= f.values.size() ? f.values[k - 1] : Number(0);
            } else if constexpr (std::is_same_v<F, Constant>) {
                return f.c;
            } else if constexpr (std::is_same_v<F, Linear>) {
                return f.c * Number(k);
            } else if constexpr (std::is_same_v<F, Geometric>) {
                return f.c * pow_int(f.ratio, k);
            } else {
                if (f.exponent.is_integer() && f.exponent.is_exact()) {
                    return f.c * pow_int(Number(k), f.exponent.rational().get_num().get_si());
                }
                return Number::approx(f.c.to_double() * std::pow(double(k), f.exponent.to_double()));
            }
        }, form_);
    }

    /// Number of leading entries outside which a_k = 0, if finite.
    std::optional<int> support_bound() const {
        if (const auto* f = std::get_if<Finite>(&form_)) return static_cast<int>(f->values.size());
        if (coefficient().is_zero()) return 0;
        return std::nullopt;
    }

    bool is_finite_support() const { return support_bound().has_value(); }

    Growth growth() const {
        return std::visit([this](const auto& f) -> Growth {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Finite> || std::is_same_v<F, Constant>) {
                return Growth::bounded;
            } else if constexpr (std::is_same_v<F, Linear>) {
                return f.c.is_zero() ? Growth::bounded : Growth::linear;
            } else if constexpr (std::is_same_v<F, Geometric>) {
                return f.c.is_zero() || abs(f.ratio) <= Number(1) ? Growth::bounded : Growth::superlinear;
            } else {
                if (f.c.is_zero() || f.exponent <= Number(0)) return Growth::bounded;
                if (f.exponent < Number(1)) return Growth::sublinear;
                if (f.exponent == Number(1)) return Growth::linear;
                return Growth::superlinear;
            }
        }, form_);
    }

    bool in_l_infinity() const { return growth() == Growth::bounded; }

    /// sup_k |a_k| for bounded sequences, +inf otherwise.
    double sup_abs() const {
        if (!in_l_infinity()) return kInf;
        return std::visit([this](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Finite>) {
                double m = 0;
                for (const auto& v : f.values) m = std::max(m, std::abs(v.to_double()));
                return m;
            } else if constexpr (std::is_same_v<F, Constant>) {
                return std::abs(f.c.to_double());
            } else if constexpr (std::is_same_v<F, Geometric>) {
                // |c| |r|^k is maximal at k = 1 when |r| <= 1
                return std::abs(f.c.to_double() * f.ratio.to_double());
            } else if constexpr (std::is_same_v<F, Power>) {
                return std::abs(f.c.to_double());
            } else {
                return 0.0;
            }
        }, form_);
    }

    /// |c| in a_k = c k or c k^1; the blow-up rate of linear growth.
    double linear_rate() const {
        if (growth() != Growth::linear) throw error("linear_rate requested for non-linear frequency growth");
        return std::abs(coefficient().to_double());
    }

    double power_exponent() const {
        if (const auto* p = std::get_if<Power>(&form_)) return p->exponent.to_double();
        if (std::holds_alternative<Linear>(form_)) return 1.0;
        return 0.0;
    }

    Number coefficient() const {
        return std::visit([](const auto& f) -> Number {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Finite>) return Number(0);
            else return f.c;
        }, form_);
    }

private:
    Form form_;
};

// ---------------------------------------------------------------------------
// Time parameters with exact representatives
//
// t = s * unit, where unit is 1, ln(beta) or the angle theta of a rational
// point (cos theta, sin theta) on the unit circle. At such points e^{a t} or
// e^{i a t} is rational whenever a * s is an integer.

class Time {
public:
    enum class Unit { plain, log_base, angle };

    Time() : Time(Number(0)) {}
    /// t = s.
    explicit Time(Number s) : s_(std::move(s)) {}

    static Time plain(Number s) { return Time(std::move(s)); }
    static Time approx(double t) { return Time(Number::approx(t)); }

    /// t = s ln(beta), beta > 0.
    static Time log(Number beta, Number s = Number(1)) {
        if (beta <= Number(0)) throw error("log time requires beta > 0");
        Time t(std::move(s));
        t.unit_ = Unit::log_base;
        t.base_ = std::move(beta);
        return t;
    }

    /// t = s theta with (cos theta, sin theta) = (c, sn).
    static Time angle(Number c, Number sn, Number s = Number(1)) {
        const Number r2 = c * c + sn * sn;
        if (r2.is_exact() ? r2 != Number(1) : std::abs(r2.to_double() - 1.0) > 1e-12) {
            throw error("angle time requires a point on the unit circle");
        }
        Time t(std::move(s));
        t.unit_ = Unit::angle;
        t.cos_ = std::move(c);
        t.sin_ = std::move(sn);
        return t;
    }

    Unit unit() const { return unit_; }
    const Number& multiplier() const { return s_; }
    const Number& base() const { return base_; }
    const Number& cos_unit() const { return cos_; }
    const Number& sin_unit() const { return sin_; }

    double value() const {
        switch (unit_) {
            case Unit::plain: return s_.to_double();
            case Unit::log_base: return s_.to_double() * std::log(base_.to_double());
            case Unit::angle: return s_.to_double() * std::atan2(sin_.to_double(), cos_.to_double());
        }
        return 0;
    }

    bool is_zero() const { return s_.is_zero(); }

    bool same_unit(const Time& o) const {
        if (unit_ != o.unit_) return false;
        switch (unit_) {
            case Unit::plain: return true;
            case Unit::log_base: return base_ == o.base_;
            case Unit::angle: return cos_ == o.cos_ && sin_ == o.sin_;
        }
        return false;
    }

    friend Time operator+(const Time& a, const Time& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.same_unit(b)) {
            Time t = a;
            t.s_ = a.s_ + b.s_;
            return t;
        }
        return approx(a.value() + b.value());
    }

    Time operator-() const {
        Time t = *this;
        t.s_ = -s_;
        return t;
    }

    std::string str() const {
        switch (unit_) {
            case Unit::plain: return s_.str();
            case Unit::log_base: return s_.str() + "*ln(" + base_.str() + ")";
            case Unit::angle: return s_.str() + "*angle(" + cos_.str() + "," + sin_.str() + ")";
        }
        return {};
    }

private:
    Number s_;
    Unit unit_ = Unit::plain;
    Number base_{1};
    Number cos_{1};
    Number sin_{0};
};

namespace detail {

inline std::optional<long> exact_integer_product(const Number& a, const Number& s) {
    if (!a.is_exact() || !s.is_exact()) return std::nullopt;
    const Number n = a * s;
    if (!n.is_integer()) return std::nullopt;
    const mpz_class z = n.rational().get_num();
    if (!z.fits_slong_p()) return std::nullopt;
    return z.get_si();
}

inline std::pair<Number, Number> complex_pow(const Number& c, const Number& s, long n) {
    Number re(1), im(0);
    Number br = c, bi = n < 0 ? -s : s;
    unsigned long e = static_cast<unsigned long>(n < 0 ? -n : n);
    while (e > 0) {
        if (e & 1) {
            Number nr = re * br - im * bi;
            im = re * bi + im * br;
            re = std::move(nr);
        }
        Number sr = br * br - bi * bi;
        bi = Number(2) * br * bi;
        br = std::move(sr);
        e >>= 1;
    }
    return {re, im};
}

} // namespace detail

/// (cosh(a t), sinh(a t)), exact when t = s ln(beta) with a s an integer.
inline std::pair<Number, Number> hyperbolic_pair(const Number& a, const Time& t) {
    if (a.is_zero() || t.is_zero()) return {Number(1), Number(0)};
    if (t.unit() == Time::Unit::log_base && t.base().is_exact()) {
        if (auto n = detail::exact_integer_product(a, t.multiplier())) {
            const Number e = pow_int(t.base(), *n);
            const Number ie = Number(1) / e;
            return {(e + ie) / Number(2), (e - ie) / Number(2)};
        }
    }
    const double x = a.to_double() * t.value();
    return {Number::approx(std::cosh(x)), Number::approx(std::sinh(x))};
}

/// (cos(a t), sin(a t)), exact when t = s theta for a rational unit point and a s is an integer.
inline std::pair<Number, Number> circular_pair(const Number& a, const Time& t) {
    if (a.is_zero() || t.is_zero()) return {Number(1), Number(0)};
    if (t.unit() == Time::Unit::angle && t.cos_unit().is_exact() && t.sin_unit().is_exact()) {
        if (auto n = detail::exact_integer_product(a, t.multiplier())) {
            return detail::complex_pow(t.cos_unit(), t.sin_unit(), *n);
        }
    }
    const double x = a.to_double() * t.value();
    return {Number::approx(std::cos(x)), Number::approx(std::sin(x))};
}

// ---------------------------------------------------------------------------
// Phase points

/// Tail of an infinite vector beyond its head. A realized envelope defines the
/// components themselves, (q_k, p_k) = C env(k) (dq, dp); an unrealized one is
/// only a bound |(q_k, p_k)| <= C env(k).
struct Envelope {
    enum class Shape { zero, exponential, power, unbounded };

    Shape shape = Shape::zero;
    double scale = 0;   // C
    double rate = 0;    // b in e^{-b k}, sigma in k^{-sigma}
    double dq = 1;
    double dp = 0;
    bool realized = true;

    static Envelope zero() { return {}; }
    static Envelope exponential(double c, double b, double dq = 1, double dp = 0) {
        return {Shape::exponential, c, b, dq, dp, true};
    }
    static Envelope power(double c, double sigma, double dq = 1, double dp = 0) {
        return {Shape::power, c, sigma, dq, dp, true};
    }
    static Envelope unbounded() { return {Shape::unbounded, kInf, 0, 0, 0, false}; }

    bool is_zero() const { return shape == Shape::zero || scale == 0; }

    /// ln env(k), without the scale.
    double log_env(int k) const {
        switch (shape) {
            case Shape::zero: return -kInf;
            case Shape::exponential: return -rate * k;
            case Shape::power: return -rate * std::log(double(k));
            case Shape::unbounded: return kInf;
        }
        return 0;
    }

    double env(int k) const { return std::exp(log_env(k)); }

    double direction_norm() const { return std::hypot(dq, dp); }

    /// Square summability of the envelope.
    bool in_l2() const {
        switch (shape) {
            case Shape::zero: return true;
            case Shape::exponential: return rate > 0 || scale == 0;
            case Shape::power: return rate > 0.5 || scale == 0;
            case Shape::unbounded: return false;
        }
        return false;
    }
};

struct Mode {
    Number q;
    Number p;
    friend bool operator==(const Mode&, const Mode&) = default;
};

class PhasePoint {
public:
    PhasePoint() = default;
    explicit PhasePoint(std::vector<Mode> head, Envelope tail = Envelope::zero())
        : head_(std::move(head)), tail_(tail) {
        if (tail_.scale < 0) throw error("tail envelope scale must be nonnegative");
    }

    /// z with a single nonzero mode at index k.
    static PhasePoint unit_mode(int k, Number q, Number p) {
        std::vector<Mode> head(static_cast<std::size_t>(k));
        head[k - 1] = {std::move(q), std::move(p)};
        return PhasePoint(std::move(head));
    }

    const std::vector<Mode>& head() const { return head_; }
    const Envelope& tail() const { return tail_; }
    int head_size() const { return static_cast<int>(head_.size()); }

    /// Component k (1-based). Empty when k lies in an unrealized tail.
    std::optional<Mode> component(int k) const {
        if (k >= 1 && k <= head_size()) return head_[k - 1];
        if (tail_.is_zero()) return Mode{Number(0), Number(0)};
        if (!tail_.realized) return std::nullopt;
        const double m = tail_.scale * tail_.env(k);
        return Mode{Number::approx(m * tail_.dq), Number::approx(m * tail_.dp)};
    }

    bool in_l2() const { return tail_.in_l2(); }

    friend bool operator==(const PhasePoint& a, const PhasePoint& b) {
        return a.head_ == b.head_ && a.tail_.shape == b.tail_.shape && a.tail_.scale == b.tail_.scale &&
               a.tail_.rate == b.tail_.rate && a.tail_.dq == b.tail_.dq && a.tail_.dp == b.tail_.dp &&
               a.tail_.realized == b.tail_.realized;
    }

private:
    std::vector<Mode> head_;
    Envelope tail_;
};

// ---------------------------------------------------------------------------
// Block flows

struct AffineBlock {
    Matrix2 linear;
    Vec2 offset{Number(0), Number(0)};

    bool is_identity() const { return linear.is_identity() && offset.x.is_zero() && offset.y.is_zero(); }
    Point apply(const Point& v) const { return linear.apply(v) + offset; }
};

enum class FlowDomain { hilbert, extended };
enum class OscillatorKind { harmonic, hyperbolic };

class BlockFlow {
public:
    struct Translation { PhasePoint h; };
    struct Harmonic { FrequencySeq a; };
    struct Hyperbolic { FrequencySeq a; };
    /// Per-index det-one maps; M_k(n) = M_k^n for integer times, identity off the map.
    struct Custom { std::map<int, Matrix2> blocks; };
    using Kind = std::variant<Translation, Harmonic, Hyperbolic, Custom>;

    explicit BlockFlow(Kind kind, FlowDomain domain = FlowDomain::extended)
        : kind_(std::move(kind)), domain_(domain) {
        if (const auto* c = std::get_if<Custom>(&kind_)) {
            for (const auto& [k, m] : c->blocks) {
                if (k < 1) throw error("block indices are 1-based");
                if (!m.is_symplectic()) throw error("custom block at index " + std::to_string(k) + " is not det-1");
            }
        }
    }

    static BlockFlow translation(PhasePoint h, FlowDomain d = FlowDomain::extended) { return BlockFlow(Translation{std::move(h)}, d); }
    static BlockFlow harmonic(FrequencySeq a, FlowDomain d = FlowDomain::extended) { return BlockFlow(Harmonic{std::move(a)}, d); }
    static BlockFlow hyperbolic(FrequencySeq a, FlowDomain d = FlowDomain::extended) { return BlockFlow(Hyperbolic{std::move(a)}, d); }
    static BlockFlow custom(std::map<int, Matrix2> m) { return BlockFlow(Custom{std::move(m)}); }
    static BlockFlow identity() { return custom({}); }

    const Kind& kind() const { return kind_; }
    FlowDomain domain() const { return domain_; }

    /// The affine action on the plane E_k at time t.
    AffineBlock block(int k, const Time& t) const {
        if (k < 1) throw error("block indices are 1-based");
        return std::visit([&](const auto& f) -> AffineBlock {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Translation>) {
                const auto hk = f.h.component(k);
                if (!hk) throw unsupported_combination("translation vector has an unrealized tail");
                const Number tt = t.unit() == Time::Unit::plain ? t.multiplier() : Number::approx(t.value());
                return {Matrix2::identity(), {tt * hk->q, tt * hk->p}};
            } else if constexpr (std::is_same_v<F, Harmonic>) {
                auto [c, s] = circular_pair(f.a(k), t);
                return {Matrix2::rotation(c, s), {Number(0), Number(0)}};
            } else if constexpr (std::is_same_v<F, Hyperbolic>) {
                auto [ch, sh] = hyperbolic_pair(f.a(k), t);
                return {Matrix2::hyperbolic(ch, sh), {Number(0), Number(0)}};
            } else {
                auto it = f.blocks.find(k);
                if (it == f.blocks.end() || t.is_zero()) return {};
                if (t.unit() != Time::Unit::plain || !t.multiplier().is_integer()) {
                    throw error("custom block flows are defined at integer times only");
                }
                const long n = t.multiplier().is_exact() ? t.multiplier().rational().get_num().get_si()
                                                          : std::lround(t.multiplier().to_double());
                Matrix2 base = n < 0 ? it->second.inverse() : it->second;
                Matrix2 out = Matrix2::identity();
                for (long i = 0; i < std::labs(n); ++i) out = out * base;
                return {out, {Number(0), Number(0)}};
            }
        }, kind_);
    }

    /// Indices where the time-t map is not the identity; empty optional when
    /// there are infinitely many.
    std::optional<std::vector<int>> nontrivial_indices(const Time& t) const {
        if (t.is_zero()) return std::vector<int>{};
        return std::visit([&](const auto& f) -> std::optional<std::vector<int>> {
            using F = std::decay_t<decltype(f)>;
            std::vector<int> out;
            if constexpr (std::is_same_v<F, Translation>) {
                if (!f.h.tail().is_zero()) return std::nullopt;
                for (int k = 1; k <= f.h.head_size(); ++k) {
                    if (!block(k, t).is_identity()) out.push_back(k);
                }
                return out;
            } else if constexpr (std::is_same_v<F, Custom>) {
                for (const auto& [k, m] : f.blocks) {
                    if (!block(k, t).is_identity()) out.push_back(k);
                }
                return out;
            } else {
                auto bound = f.a.support_bound();
                if (!bound) return std::nullopt;
                for (int k = 1; k <= *bound; ++k) {
                    if (!block(k, t).is_identity()) out.push_back(k);
                }
                return out;
            }
        }, kind_);
    }

    const FrequencySeq* frequencies() const {
        if (const auto* h = std::get_if<Harmonic>(&kind_)) return &h->a;
        if (const auto* h = std::get_if<Hyperbolic>(&kind_)) return &h->a;
        return nullptr;
    }

    bool is_hyperbolic() const { return std::holds_alternative<Hyperbolic>(kind_); }
    bool is_harmonic() const { return std::holds_alternative<Harmonic>(kind_); }

private:
    Kind kind_;
    FlowDomain domain_;
};

// ---------------------------------------------------------------------------
// Existence interval of hyperbolic trajectories in the Hilbert phase space

struct ExistenceInterval {
    double lower = -kInf;
    double upper = kInf;

    /// Open interval membership; the endpoints themselves are outside.
    bool contains(double t) const { return (lower < t && t < upper) || (t == 0 && lower == 0 && upper == 0); }
    bool is_whole_line() const { return lower == -kInf && upper == kInf; }
};

/// Maximal interval on which sum_k (q_k(t)^2 + p_k(t)^2) converges for the
/// hyperbolic flow with frequencies `a`. (0, 0) means only t = 0 survives.
inline ExistenceInterval existence_interval(const PhasePoint& z0, const FrequencySeq& a) {
    const Envelope& tail = z0.tail();
    if (!tail.in_l2()) throw error("initial point is not square summable");
    if (tail.is_zero() || a.in_l_infinity()) return {};
    switch (a.growth()) {
        case FrequencySeq::Growth::bounded:
        case FrequencySeq::Growth::sublinear:
            // e^{|c t| k^s} is dominated by any geometric decay when s < 1,
            // and by no power decay
            if (tail.shape == Envelope::Shape::exponential) return {};
            return {0, 0};
        case FrequencySeq::Growth::linear:
            if (tail.shape == Envelope::Shape::exponential) {
                const double T = tail.rate / a.linear_rate();
                return {-T, T};
            }
            return {0, 0};
        case FrequencySeq::Growth::superlinear:
            return {0, 0};
    }
    throw unsupported_combination("no closed form for this envelope and frequency form");
}

// ---------------------------------------------------------------------------
// Trajectories

namespace detail {

inline Envelope flowed_tail(const Envelope& tail, const BlockFlow& flow, const Time& t) {
    if (tail.is_zero() || t.is_zero()) return tail;
    Envelope out = tail;
    out.realized = false;
    out.scale = tail.scale * tail.direction_norm();
    out.dq = 1;
    out.dp = 0;
    if (flow.is_harmonic()) return out;  // rotations preserve |(q_k, p_k)|
    const FrequencySeq* a = flow.frequencies();
    if (a == nullptr) return out;
    const double at = std::abs(t.value());
    if (a->is_finite_support()) return tail;
    switch (a->growth()) {
        case FrequencySeq::Growth::bounded:
            out.scale *= std::exp(a->sup_abs() * at);
            return out;
        case FrequencySeq::Growth::linear:
            if (tail.shape == Envelope::Shape::exponential) {
                out.rate = tail.rate - a->linear_rate() * at;
                return out;
            }
            return Envelope::unbounded();
        case FrequencySeq::Growth::sublinear:
            if (tail.shape == Envelope::Shape::exponential) {
                // e^{|c t| k^s - (b/2) k} is bounded; fold its supremum into the scale
                const double c = std::abs(a->coefficient().to_double()) * at;
                const double s = a->power_exponent();
                const double half = tail.rate / 2;
                double sup = 1;
                for (int k = 1; k < 1'000'000; ++k) {
                    const double v = c * std::pow(double(k), s) - half * k;
                    sup = std::max(sup, std::exp(v));
                    if (v < -50 && k > 10) break;
                }
                out.scale *= sup;
                out.rate = half;
                return out;
            }
            return Envelope::unbounded();
        case FrequencySeq::Growth::superlinear:
            return Envelope::unbounded();
    }
    return out;
}

inline Envelope translated_tail(const Envelope& z, const Envelope& h, double t) {
    if (h.is_zero() || t == 0) return z;
    Envelope hb = h;
    hb.scale = std::abs(t) * h.scale * h.direction_norm();
    hb.dq = 1;
    hb.dp = 0;
    hb.realized = false;
    if (z.is_zero()) return hb;
    Envelope zb = z;
    zb.scale = z.scale * z.direction_norm();
    zb.dq = 1;
    zb.dp = 0;
    zb.realized = false;
    if (zb.shape == Envelope::Shape::unbounded || hb.shape == Envelope::Shape::unbounded) return Envelope::unbounded();
    if (zb.shape == hb.shape) {
        zb.scale += hb.scale;
        zb.rate = std::min(zb.rate, hb.rate);
        return zb;
    }
    // mixed exponential/power: C e^{-b k} <= C sup_k(e^{-b k} k^sigma) k^{-sigma}
    const Envelope& ex = zb.shape == Envelope::Shape::exponential ? zb : hb;
    const Envelope& pw = zb.shape == Envelope::Shape::power ? zb : hb;
    const double kstar = std::max(1.0, pw.rate / ex.rate);
    const double factor = std::max(std::exp(-ex.rate) , std::exp(-ex.rate * kstar) * std::pow(kstar, pw.rate));
    Envelope out = pw;
    out.scale = pw.scale + ex.scale * factor;
    return out;
}

} // namespace detail

/// Phase point at time t. In the Hilbert domain the hyperbolic flow raises
/// left_phase_space outside the existence interval (endpoints included).
inline PhasePoint trajectory(const BlockFlow& flow, const PhasePoint& z0, const Time& t) {
    if (t.is_zero()) return z0;
    if (flow.domain() == FlowDomain::hilbert) {
        if (!z0.in_l2()) throw error("initial point is not square summable");
        if (flow.is_hyperbolic()) {
            const auto iv = existence_interval(z0, *flow.frequencies());
            if (!iv.contains(t.value())) {
                throw left_phase_space("trajectory leaves the Hilbert phase space before t = " + t.str());
            }
        }
    }
    int head = z0.head_size();
    Envelope tail;
    if (const auto* tr = std::get_if<BlockFlow::Translation>(&flow.kind())) {
        head = std::max(head, tr->h.head_size());
        tail = detail::translated_tail(z0.tail(), tr->h.tail(), t.value());
        if (tr->h.tail().is_zero()) tail = z0.tail();
    } else if (const auto* cu = std::get_if<BlockFlow::Custom>(&flow.kind())) {
        if (!cu->blocks.empty()) {
            const int last = cu->blocks.rbegin()->first;
            if (last > head && !z0.tail().is_zero() && !z0.tail().realized) {
                throw unsupported_combination("custom block acts inside an unrealized tail");
            }
            head = std::max(head, last);
        }
        tail = z0.tail();
    } else {
        tail = detail::flowed_tail(z0.tail(), flow, t);
        if (const auto bound = flow.frequencies()->support_bound(); bound && *bound > head) {
            if (!z0.tail().is_zero() && !z0.tail().realized) {
                throw unsupported_combination("flow acts inside an unrealized tail");
            }
            head = *bound;
        }
    }
    std::vector<Mode> out;
    out.reserve(static_cast<std::size_t>(head));
    for (int k = 1; k <= head; ++k) {
        const auto zk = z0.component(k);
        const Point img = flow.block(k, t).apply({zk->q, zk->p});
        out.push_back({img.x, img.y});
    }
    return PhasePoint(std::move(out), tail);
}

/// Per-mode energy: 1/2 a_k (p^2 - q^2) (hyperbolic) or a_k (p^2 + q^2) (harmonic).
inline Number mode_energy(const PhasePoint& z, int k, OscillatorKind kind, const FrequencySeq& a) {
    const auto m = z.component(k);
    if (!m) throw error("mode " + std::to_string(k) + " lies in an unrealized tail");
    if (kind == OscillatorKind::hyperbolic) return a(k) * (m->p * m->p - m->q * m->q) / Number(2);
    return a(k) * (m->p * m->p + m->q * m->q);
}

// ---------------------------------------------------------------------------
// Series over tails

namespace detail {

/// Sum of a positive series term(k), k >= start, whose terms eventually decay
/// geometrically (power_like = false) or like k^{-gamma} with gamma > 1.
/// Returns partial sum plus a remainder estimate.
inline double sum_positive_tail(const auto& term, int start, bool power_like, double gamma = 2.0) {
    double sum = 0;
    int k = start;
    const int max_terms = power_like ? 200'000 : 20'000;
    double last = 0;
    for (int n = 0; n < max_terms; ++n, ++k) {
        last = term(k);
        if (!std::isfinite(last)) return kInf;
        sum += last;
        if (!power_like && n > 64 && last <= 1e-18 * sum) break;
    }
    if (last == 0) return sum;
    if (power_like) return sum + last * k / (gamma - 1.0);
    const double next = term(k);
    const double r = next / last;
    if (r >= 1) return kInf;
    return sum + next / (1 - r);
}

} // namespace detail

struct EnergyReport {
    bool divergent = false;
    Number head;            // exact sum over head modes
    double tail_bound = 0;  // bound on the absolute tail series

    double value() const { return divergent ? kInf : head.to_double(); }
};

/// Hamiltonian value on z: head sum plus a classification of the tail series
/// sum |a_k| (p_k^2 + q_k^2) (halved in the hyperbolic case).
inline EnergyReport total_energy(const PhasePoint& z, OscillatorKind kind, const FrequencySeq& a) {
    EnergyReport rep;
    for (int k = 1; k <= z.head_size(); ++k) rep.head += mode_energy(z, k, kind, a);
    const Envelope& tail = z.tail();
    if (tail.is_zero()) return rep;
    const int start = z.head_size() + 1;
    if (const auto bound = a.support_bound(); bound) {
        if (*bound < start) return rep;
        if (tail.realized) {
            for (int k = start; k <= *bound; ++k) rep.head += mode_energy(z, k, kind, a);
            return rep;
        }
    }
    if (tail.shape == Envelope::Shape::unbounded) {
        rep.divergent = true;
        return rep;
    }
    const double half = kind == OscillatorKind::hyperbolic ? 0.5 : 1.0;
    const double c2 = tail.scale * tail.scale * (tail.realized ? tail.dq * tail.dq + tail.dp * tail.dp : 1.0);
    auto term = [&](int k) { return half * std::abs(a(k).to_double()) * c2 * std::exp(2 * tail.log_env(k)); };
    if (tail.shape == Envelope::Shape::exponential) {
        bool converges = true;
        if (const auto* g = std::get_if<FrequencySeq::Geometric>(&a.form())) {
            converges = g->c.is_zero() || std::abs(g->ratio.to_double()) < std::exp(2 * tail.rate);
        } else {
            converges = tail.rate > 0;
        }
        if (!converges) {
            rep.divergent = true;
            return rep;
        }
        rep.tail_bound = detail::sum_positive_tail(term, start, false);
        return rep;
    }
    // power envelope k^{-sigma}: |a_k| k^{-2 sigma}
    const double two_sigma = 2 * tail.rate;
    double gamma = 0;
    switch (a.growth()) {
        case FrequencySeq::Growth::bounded:
            if (const auto* g = std::get_if<FrequencySeq::Geometric>(&a.form()); g && std::abs(g->ratio.to_double()) < 1) {
                rep.tail_bound = detail::sum_positive_tail(term, start, false);
                return rep;
            }
            gamma = two_sigma - (a.power_exponent() < 0 ? a.power_exponent() : 0.0);
            break;
        case FrequencySeq::Growth::sublinear:
        case FrequencySeq::Growth::linear:
            gamma = two_sigma - a.power_exponent();
            break;
        case FrequencySeq::Growth::superlinear:
            if (std::holds_alternative<FrequencySeq::Geometric>(a.form())) {
                rep.divergent = true;
                return rep;
            }
            gamma = two_sigma - a.power_exponent();
            break;
    }
    if (gamma <= 1) {
        rep.divergent = true;
        return rep;
    }
    rep.tail_bound = detail::sum_positive_tail(term, start, true, gamma);
    return rep;
}

/// Membership in the subspace where sum |a_k|^2 (p_k^2 + q_k^2) converges.
inline bool in_e2(const PhasePoint& z, const FrequencySeq& a) {
    const Envelope& tail = z.tail();
    if (tail.is_zero() || a.is_finite_support()) return true;
    if (tail.shape == Envelope::Shape::unbounded) return false;
    if (tail.shape == Envelope::Shape::exponential) {
        if (const auto* g = std::get_if<FrequencySeq::Geometric>(&a.form())) {
            return std::abs(g->ratio.to_double()) < std::exp(tail.rate);
        }
        return tail.rate > 0;
    }
    if (std::holds_alternative<FrequencySeq::Geometric>(a.form())) return !(a.growth() == FrequencySeq::Growth::superlinear);
    return 2 * tail.rate - 2 * std::max(0.0, a.power_exponent()) > 1;
}

// ---------------------------------------------------------------------------
// Energy growth

struct EnergyRow {
    double t;
    int n;
    double partial_sum;      // sum_{k<=N} (q_k(t)^2 + p_k(t)^2); may overflow to inf
    double log_partial_sum;  // natural log, always finite for nonzero sums
};

namespace detail {

/// ln(q_k(t)^2 + p_k(t)^2) for the hyperbolic flow, stable for huge |a t|.
inline double log_mode_norm2(double q, double p, double log_scale, double x) {
    if (q == 0 && p == 0) return -kInf;
    const double ax = std::abs(x);
    const double e = std::exp(-2 * ax);
    const double sg = x < 0 ? -1.0 : 1.0;
    // ch = e^{|x|}(1+e)/2, sh = sg e^{|x|}(1-e)/2
    const double bq = q * (1 + e) / 2 + p * sg * (1 - e) / 2;
    const double bp = p * (1 + e) / 2 + q * sg * (1 - e) / 2;
    const double n2 = bq * bq + bp * bp;
    if (n2 == 0) return -kInf;
    return 2 * (log_scale + ax) + std::log(n2);
}

inline double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

} // namespace detail

/// Partial sums of the phase-space norm along the flow, one row per (t, N).
/// The flow may be harmonic or hyperbolic; components beyond the head come
/// from the realized tail of z0.
inline std::vector<EnergyRow> energy_growth_table(const PhasePoint& z0, const FrequencySeq& a,
                                                  const std::vector<double>& ts, const std::vector<int>& ns,
                                                  OscillatorKind kind = OscillatorKind::hyperbolic) {
    if (!z0.tail().is_zero() && !z0.tail().realized) {
        throw unsupported_combination("energy table needs a realized tail");
    }
    int nmax = 0;
    for (int n : ns) nmax = std::max(nmax, n);
    std::vector<EnergyRow> rows;
    rows.reserve(ts.size() * ns.size());
    for (double t : ts) {
        std::vector<double> logs(static_cast<std::size_t>(nmax) + 1, -kInf);
        double acc = -kInf;
        for (int k = 1; k <= nmax; ++k) {
            double q, p, log_scale;
            if (k <= z0.head_size()) {
                q = z0.head()[k - 1].q.to_double();
                p = z0.head()[k - 1].p.to_double();
                log_scale = 0;
            } else {
                const Envelope& tail = z0.tail();
                q = tail.dq;
                p = tail.dp;
                log_scale = tail.is_zero() ? -kInf : std::log(tail.scale) + tail.log_env(k);
            }
            double lk;
            if (log_scale == -kInf) {
                lk = -kInf;
            } else if (kind == OscillatorKind::hyperbolic) {
                lk = detail::log_mode_norm2(q, p, log_scale, a(k).to_double() * t);
            } else {
                const double n2 = q * q + p * p;
                lk = n2 == 0 ? -kInf : 2 * log_scale + std::log(n2);
            }
            acc = detail::log_add(acc, lk);
            logs[k] = acc;
        }
        for (int n : ns) {
            const double l = logs[static_cast<std::size_t>(n)];
            rows.push_back({t, n, std::exp(l), l});
        }
    }
    return rows;
}

/// Upper bound on the full series sum_k (q_k(t)^2 + p_k(t)^2) along the
/// hyperbolic flow; +inf outside the existence interval.
inline double energy_bound(const PhasePoint& z0, const FrequencySeq& a, double t) {
    double head = 0;
    for (int k = 1; k <= z0.head_size(); ++k) {
        const double x = a(k).to_double() * t;
        const double q = z0.head()[k - 1].q.to_double();
        const double p = z0.head()[k - 1].p.to_double();
        const double qt = q * std::cosh(x) + p * std::sinh(x);
        const double pt = p * std::cosh(x) + q * std::sinh(x);
        head += qt * qt + pt * pt;
    }
    const Envelope& tail = z0.tail();
    if (tail.is_zero()) return head;
    const auto iv = existence_interval(z0, a);
    if (!iv.contains(t)) return kInf;
    const double w = std::abs(tail.dq) + std::abs(tail.dp);
    const double c2 = 2 * w * w * tail.scale * tail.scale;
    const int start = z0.head_size() + 1;
    // |q_k(t)|^2 + |p_k(t)|^2 <= 2 (|dq|+|dp|)^2 C^2 env(k)^2 e^{2 |a_k t|}
    if (tail.shape == Envelope::Shape::exponential && a.growth() == FrequencySeq::Growth::linear) {
        const double decay = 2 * (tail.rate - a.linear_rate() * std::abs(t));
        const double r = std::exp(-decay);
        return head + c2 * std::pow(r, start) / (1 - r);
    }
    auto term = [&](int k) {
        return c2 * std::exp(2 * tail.log_env(k) + 2 * std::abs(a(k).to_double() * t));
    };
    const bool power_like = tail.shape == Envelope::Shape::power;
    return head + detail::sum_positive_tail(term, start, power_like, 2 * tail.rate);
}

// ---------------------------------------------------------------------------
// Pseudosymplectic pairing

struct PseudoSymplecticValue {
    enum class Status { in_domain, not_in_domain };
    Number value;           // head contributions, exact when heads are exact
    Status status = Status::in_domain;
    double tail_bound = 0;  // bound on |sum over the tails|

    bool in_domain() const { return status == Status::in_domain; }
};

/// Omega(z, w) = sum_k q_k p'_k - q'_k p_k on the extended space, defined
/// where the summands are absolutely summable.
inline PseudoSymplecticValue pseudo_symplectic(const PhasePoint& z, const PhasePoint& w) {
    PseudoSymplecticValue out;
    const int head = std::max(z.head_size(), w.head_size());
    const Envelope& tz = z.tail();
    const Envelope& tw = w.tail();
    auto head_term = [&](int k) -> std::optional<Number> {
        const auto a = z.component(k);
        const auto b = w.component(k);
        if (!a || !b) return std::nullopt;
        return a->q * b->p - b->q * a->p;
    };
    for (int k = 1; k <= head; ++k) {
        if (auto term = head_term(k)) {
            out.value += *term;
        } else {
            // one side is a bound-only tail inside the other's head: bound the term
            const auto known = z.component(k) ? z.component(k) : w.component(k);
            const Envelope& bound = z.component(k) ? tw : tz;
            const double m = std::hypot(known->q.to_double(), known->p.to_double());
            out.tail_bound += m * bound.scale * bound.env(k);
        }
    }
    if (tz.is_zero() || tw.is_zero()) return out;
    if (tz.shape == Envelope::Shape::unbounded || tw.shape == Envelope::Shape::unbounded) {
        out.status = PseudoSymplecticValue::Status::not_in_domain;
        return out;
    }
    double coupling = tz.scale * tw.scale;
    if (tz.realized && tw.realized) {
        coupling *= std::abs(tz.dq * tw.dp - tw.dq * tz.dp);
        if (coupling == 0) return out;
    }
    const int start = head + 1;
    auto term = [&](int k) { return coupling * std::exp(tz.log_env(k) + tw.log_env(k)); };
    if (tz.shape == Envelope::Shape::exponential || tw.shape == Envelope::Shape::exponential) {
        const double decay = (tz.shape == Envelope::Shape::exponential ? tz.rate : 0) +
                             (tw.shape == Envelope::Shape::exponential ? tw.rate : 0);
        if (decay <= 0) {
            out.status = PseudoSymplecticValue::Status::not_in_domain;
            return out;
        }
        out.tail_bound += detail::sum_positive_tail(term, start, false);
        return out;
    }
    const double gamma = tz.rate + tw.rate;
    if (gamma <= 1) {
        out.status = PseudoSymplecticValue::Status::not_in_domain;
        return out;
    }
    out.tail_bound += detail::sum_positive_tail(term, start, true, gamma);
    return out;
}

// ---------------------------------------------------------------------------
// Hyperbolic action-angle chart q = r ch(phi), p = r sh(phi)

struct ActionAngle {
    double r = 0;
    double phi = 0;
};

/// Chart coordinates of the head modes. Modes with q^2 <= p^2 other than the
/// origin lie outside the chart and raise degenerate_set; the origin maps to
/// (0, 0).
inline std::vector<ActionAngle> to_action_angle(const PhasePoint& z) {
    std::vector<ActionAngle> out;
    out.reserve(z.head().size());
    int k = 1;
    for (const auto& m : z.head()) {
        if (m.q.is_zero() && m.p.is_zero()) {
            out.push_back({0, 0});
        } else {
            if (abs(m.q) <= abs(m.p)) {
                throw degenerate_set("mode " + std::to_string(k) + " lies outside the hyperbolic chart |q| > |p|");
            }
            const double q = m.q.to_double();
            const double p = m.p.to_double();
            const double r = std::copysign(std::sqrt((q - p) * (q + p)), q);
            out.push_back({r, std::atanh(p / q)});
        }
        ++k;
    }
    return out;
}

inline PhasePoint from_action_angle(const std::vector<ActionAngle>& aa) {
    std::vector<Mode> head;
    head.reserve(aa.size());
    for (const auto& c : aa) {
        head.push_back({Number::approx(c.r * std::cosh(c.phi)), Number::approx(c.r * std::sinh(c.phi))});
    }
    return PhasePoint(std::move(head));
}

/// The hyperbolic flow in chart coordinates: (r, phi) -> (r, phi + a t).
inline std::vector<ActionAngle> flow_in_action_angle(std::vector<ActionAngle> aa, const FrequencySeq& a, double t) {
    for (std::size_t i = 0; i < aa.size(); ++i) aa[i].phi += a(static_cast<int>(i) + 1).to_double() * t;
    return aa;
}

} // namespace symlab
