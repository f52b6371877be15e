#pragma once

// Translation-invariant finitely additive measures on the line obtained from
// Cesaro-type Banach limits, restricted to sets whose symmetric window
// averages converge classically. On that class every such Banach limit
// returns the same value: the asymptotic density.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/interval_set.hpp"
#include "symlab/number.hpp"

namespace symlab {

/// A periodic set with a bounded symmetric-difference patch:
///   S = (pattern + L Z) xor patch,   pattern within [0, L).
class EventuallyPeriodicSet {
public:
    EventuallyPeriodicSet() : EventuallyPeriodicSet(Number(1), {}, {}) {}

    /// Pattern intervals may lie anywhere; they are reduced modulo the period.
    EventuallyPeriodicSet(Number period, const IntervalSet& pattern, IntervalSet patch)
        : period_(std::move(period)), patch_(std::move(patch)) {
        if (period_ <= Number(0)) throw error("period must be positive");
        pattern_ = reduce(pattern);
    }

    /// (periodic pattern u added) \ removed.
    static EventuallyPeriodicSet with_perturbation(Number period, const IntervalSet& pattern,
                                                   const IntervalSet& added, const IntervalSet& removed) {
        EventuallyPeriodicSet base(std::move(period), pattern, {});
        const auto hull = unite(added, removed).hull();
        if (!hull) return base;
        const IntervalSet periodic = base.periodic_over(hull->lo, hull->hi);
        const IntervalSet exact = subtract(unite(periodic, added), removed);
        base.patch_ = symmetric_difference(exact, periodic);
        return base;
    }

    static EventuallyPeriodicSet full_line() { return {Number(1), IntervalSet::single(Number(0), Number(1)), {}}; }
    static EventuallyPeriodicSet bounded(IntervalSet s) { return {Number(1), {}, std::move(s)}; }

    const Number& period() const { return period_; }
    const IntervalSet& pattern() const { return pattern_; }
    const IntervalSet& patch() const { return patch_; }

    bool is_exact() const { return period_.is_exact() && pattern_.is_exact() && patch_.is_exact(); }

    /// |pattern| / L, the value of every Cesaro Banach limit on the indicator.
    Number density() const { return pattern_.measure() / period_; }

    bool contains(const Number& x) const {
        return pattern_.contains(mod(x, period_)) != patch_.contains(x);
    }

    /// The periodic part restricted to [lo, hi).
    IntervalSet periodic_over(const Number& lo, const Number& hi) const {
        std::vector<Interval> pieces;
        if (!(lo < hi) || pattern_.is_empty()) return {};
        Number start = floor(lo / period_) * period_;
        for (; start < hi; start += period_) {
            for (const auto& i : pattern_.pieces()) pieces.push_back({i.lo + start, i.hi + start});
        }
        return IntervalSet::of(std::move(pieces)).clipped(lo, hi);
    }

    /// Exact measure of S n [lo, hi).
    Number measure_in(const Number& lo, const Number& hi) const {
        if (!(lo < hi)) return Number(0);
        Number m = periodic_measure_upto(hi) - periodic_measure_upto(lo);
        const IntervalSet patch_w = patch_.clipped(lo, hi);
        if (const auto h = patch_w.hull()) {
            const IntervalSet overlap = intersect(periodic_over(h->lo, h->hi), patch_w);
            m += patch_w.measure() - Number(2) * overlap.measure();
        }
        return m;
    }

    /// (1 / 2X) |S n [-X, X)|.
    Number window_average(const Number& x) const {
        if (x <= Number(0)) throw error("window must be positive");
        return measure_in(-x, x) / (Number(2) * x);
    }

    /// Length of the hull of the patch (0 when unpatched).
    Number patch_span() const {
        const auto h = patch_.hull();
        return h ? h->hi - h->lo : Number(0);
    }

    /// S + h.
    EventuallyPeriodicSet translated(const Number& h) const {
        EventuallyPeriodicSet out = *this;
        out.pattern_ = reduce(pattern_.shifted(h));
        out.patch_ = patch_.shifted(h);
        return out;
    }

    /// Same pattern written over a multiple of the period.
    EventuallyPeriodicSet with_period(const Number& multiple_period) const {
        const Number ratio = multiple_period / period_;
        if (!ratio.is_integer() || ratio <= Number(0)) throw error("new period is not a positive multiple");
        EventuallyPeriodicSet out = *this;
        out.period_ = multiple_period;
        out.pattern_ = periodic_over(Number(0), multiple_period);
        return out;
    }

private:
    IntervalSet reduce(const IntervalSet& s) const {
        std::vector<Interval> out;
        for (const auto& i : s.pieces()) {
            if (i.hi - i.lo >= period_) return IntervalSet::single(Number(0), period_);
            const Number base = floor(i.lo / period_) * period_;
            const Number lo = i.lo - base;
            const Number hi = i.hi - base;
            if (hi <= period_) {
                out.push_back({lo, hi});
            } else {
                out.push_back({lo, period_});
                out.push_back({Number(0), hi - period_});
            }
        }
        return IntervalSet::of(std::move(out));
    }

    /// Measure of the periodic part on [0, x) (negative for x < 0).
    Number periodic_measure_upto(const Number& x) const {
        const Number cycles = floor(x / period_);
        const Number rest = x - cycles * period_;
        return cycles * pattern_.measure() + pattern_.clipped(Number(0), rest).measure();
    }

    Number period_;
    IntervalSet pattern_;
    IntervalSet patch_;
};

inline Number density(const EventuallyPeriodicSet& s) { return s.density(); }

/// Rotation of the pattern by h mod L and shift of the patch; density unchanged.
inline EventuallyPeriodicSet translate_set(const EventuallyPeriodicSet& s, const Number& h) { return s.translated(h); }

/// lcm of two positive rationals n1/d1, n2/d2.
inline Number rational_lcm(const Number& a, const Number& b) {
    if (!a.is_exact() || !b.is_exact()) throw unsupported_set("periods must be rational to combine sets");
    const mpq_class& x = a.rational();
    const mpq_class& y = b.rational();
    mpz_class num1 = x.get_num() * y.get_den();
    mpz_class num2 = y.get_num() * x.get_den();
    mpz_class l;
    mpz_lcm(l.get_mpz_t(), num1.get_mpz_t(), num2.get_mpz_t());
    mpq_class out(l, x.get_den() * y.get_den());
    out.canonicalize();
    return Number(out);
}

namespace detail {

template <class Op>
EventuallyPeriodicSet combine(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b, Op op) {
    const Number period = rational_lcm(a.period(), b.period());
    const EventuallyPeriodicSet aa = a.with_period(period);
    const EventuallyPeriodicSet bb = b.with_period(period);
    const IntervalSet pattern = op(aa.pattern(), bb.pattern());
    EventuallyPeriodicSet out(period, pattern, {});
    const auto hull = unite(a.patch(), b.patch()).hull();
    if (!hull) return out;
    auto exact_over = [&](const EventuallyPeriodicSet& s) {
        return symmetric_difference(s.periodic_over(hull->lo, hull->hi), s.patch().clipped(hull->lo, hull->hi));
    };
    const IntervalSet inside = op(exact_over(aa), exact_over(bb));
    return EventuallyPeriodicSet(period, pattern,
                                 symmetric_difference(inside, out.periodic_over(hull->lo, hull->hi)));
}

} // namespace detail

inline EventuallyPeriodicSet unite(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return detail::combine(a, b, [](const IntervalSet& x, const IntervalSet& y) { return unite(x, y); });
}
inline EventuallyPeriodicSet intersect(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return detail::combine(a, b, [](const IntervalSet& x, const IntervalSet& y) { return intersect(x, y); });
}
inline EventuallyPeriodicSet subtract(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return detail::combine(a, b, [](const IntervalSet& x, const IntervalSet& y) { return subtract(x, y); });
}

// ---------------------------------------------------------------------------
// Cesaro means

struct CesaroMean {
    std::complex<double> value;
    double error_bound = 0;  // |value - limit|, quadrature plus window terms
    double window = 0;
};

/// (1/2X) int_{-X}^{X} e^{i c u} du = sin(cX)/(cX); the limit is 0 for c != 0.
inline CesaroMean cesaro_mean_exponential(double c, double x) {
    if (!(x > 0)) throw error("window must be positive");
    if (c == 0) return {1.0, 0.0, x};
    const double u = c * x;
    return {std::sin(u) / u, std::min(1.0, 1.0 / std::abs(u)), x};
}

/// Closed-form integrands for numeric Cesaro means.
struct CesaroIntegrand {
    struct Constant { std::complex<double> value; };
    struct Exponential { double c; };                     // e^{i c u}
    struct Indicator { EventuallyPeriodicSet set; };
    struct Product { std::vector<CesaroIntegrand> factors; };
    std::variant<Constant, Exponential, Indicator, Product> form;

    std::complex<double> operator()(double u) const {
        return std::visit([u](const auto& f) -> std::complex<double> {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Constant>) return f.value;
            else if constexpr (std::is_same_v<F, Exponential>) return std::polar(1.0, f.c * u);
            else if constexpr (std::is_same_v<F, Indicator>) return f.set.contains(Number::approx(u)) ? 1.0 : 0.0;
            else {
                std::complex<double> v = 1.0;
                for (const auto& g : f.factors) v *= g(u);
                return v;
            }
        }, form);
    }
};

namespace detail {

struct IntegrandProfile {
    double sup = 1;              // sup |f|
    double frequency = 0;        // total c of the exponential factors
    std::complex<double> amplitude = 1.0;
    std::vector<const EventuallyPeriodicSet*> indicators;
};

inline void profile_of(const CesaroIntegrand& f, IntegrandProfile& p) {
    std::visit([&p](const auto& g) {
        using F = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<F, CesaroIntegrand::Constant>) {
            p.sup *= std::abs(g.value);
            p.amplitude *= g.value;
        } else if constexpr (std::is_same_v<F, CesaroIntegrand::Exponential>) {
            p.frequency += g.c;
        } else if constexpr (std::is_same_v<F, CesaroIntegrand::Indicator>) {
            p.indicators.push_back(&g.set);
        } else {
            for (const auto& h : g.factors) profile_of(h, p);
        }
    }, f.form);
}

/// Upper bound on the number of boundary points of s inside [-x, x].
inline double jump_count(const EventuallyPeriodicSet& s, double x) {
    const double periods = 2 * x / s.period().to_double() + 2;
    return 2.0 * static_cast<double>(s.pattern().pieces().size()) * periods +
           2.0 * static_cast<double>(s.patch().pieces().size());
}

} // namespace detail

/// Composite midpoint rule for the window average over [-X, X] with `cells`
/// cells. The error bound adds the quadrature bound to the known distance
/// between the window average and its Cesaro limit (exponential products and
/// single indicators).
inline CesaroMean cesaro_mean_numeric(const CesaroIntegrand& f, double x, long cells = 1 << 20) {
    if (!(x > 0)) throw error("window must be positive");
    if (cells < 1) throw error("quadrature needs at least one cell");
    const double h = 2 * x / static_cast<double>(cells);
    std::complex<double> sum = 0;
    for (long i = 0; i < cells; ++i) sum += f(-x + (static_cast<double>(i) + 0.5) * h);
    const std::complex<double> avg = sum * h / (2 * x);

    detail::IntegrandProfile prof;
    detail::profile_of(f, prof);
    const double m2 = prof.sup * prof.frequency * prof.frequency;
    double quad = static_cast<double>(cells) * h * h * h * m2 / 24.0;
    for (const auto* s : prof.indicators) quad += detail::jump_count(*s, x) * h * 2 * prof.sup;
    quad /= 2 * x;

    double window = std::numeric_limits<double>::infinity();
    if (prof.indicators.empty()) {
        window = prof.frequency == 0 ? 0.0 : std::abs(prof.amplitude) * std::min(1.0, 1.0 / std::abs(prof.frequency * x));
    } else if (prof.indicators.size() == 1 && prof.frequency == 0) {
        const auto* s = prof.indicators.front();
        window = std::abs(prof.amplitude) * (s->period() + s->patch_span()).to_double() / x;
    }
    return {avg, quad + window, x};
}

} // namespace symlab
