#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "symlab/koopman.hpp"

using namespace symlab;

namespace symlab {
void PrintTo(const Coefficient& c, std::ostream* os) { *os << c.str(); }
} // namespace symlab

namespace {

Number q(long n, long d = 1) { return Number::ratio(n, d); }

PlaneSet rect(long x0, long y0, long x1, long y1, long d = 1) {
    return PlaneSet::rectangle(q(x0, d), q(y0, d), q(x1, d), q(y1, d));
}

RingSet unit_bar() { return RingSet::from_bar(CylinderBar({{1, PlaneSet::unit_cell()}})); }

SymplecticFunction random_function(oracle::Rng& rng) {
    SymplecticFunction f;
    const int terms = oracle::pick(rng, 1, 3);
    for (int i = 0; i < terms; ++i) {
        const Coefficient c(oracle::rational(rng, 3, 5), oracle::rational(rng, 3, 5));
        f.add(c, activate(RingSet::from_bar(oracle::to_bar(oracle::random_raw_bar(rng, 3))), {1, 2, 3}));
    }
    return f;
}

HyperbolicRingSet radial_bar(const RadialSet& a, int k = 1) {
    return HyperbolicRingSet::from_bar(HyperbolicBar({{k, {a, EventuallyPeriodicSet::full_line()}}}));
}

EigenFunction eigen(std::vector<Number> m) {
    return {std::move(m), HyperbolicFunction::indicator(radial_bar(RadialSet::single(q(0), q(2))))};
}

} // namespace

TEST(LpNorm, Examples) {
    const auto u = SymplecticFunction::indicator(unit_bar());
    for (double p : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()}) EXPECT_DOUBLE_EQ(lp_norm(u, p), 1.0);
    const auto half = SymplecticFunction::indicator(RingSet::from_bar(CylinderBar({{1, rect(0, 0, 1, 1, 2)}, {2, rect(0, 0, 2, 1)}})));
    EXPECT_EQ(lp_norm_pow(half, 1), q(1, 2));
    const auto two = half.scaled(Coefficient(Number(2)));
    EXPECT_EQ(lp_norm_pow(two, 2), Number(2));
    EXPECT_DOUBLE_EQ(lp_norm(two, 2), std::sqrt(2.0));
    EXPECT_EQ(lp_norm(SymplecticFunction(), 2), 0.0);
    EXPECT_THROW(lp_norm(u, 0.5), error);
}

TEST(LpNorm, ComplexCoefficients) {
    const auto f = SymplecticFunction::indicator(unit_bar()).scaled(Coefficient(q(3), q(4)));
    EXPECT_EQ(lp_norm_pow(f, 2), Number(25));
    EXPECT_NEAR(lp_norm(f, 1), 5.0, 1e-15);
    EXPECT_NEAR(lp_norm(f, std::numeric_limits<double>::infinity()), 5.0, 1e-15);
}

TEST(SimpleFunction, AddRefinesOverlappingSupports) {
    const RingSet a = RingSet::from_bar(CylinderBar({{1, rect(0, 0, 2, 1)}}));
    const RingSet b = RingSet::from_bar(CylinderBar({{1, rect(1, 0, 3, 1)}}));
    SymplecticFunction f = SymplecticFunction::indicator(a);
    f.add(Coefficient(Number(2)), b);
    EXPECT_EQ(f.terms().size(), 3u);
    // values 1, 3, 2 on pieces of measure 1 each
    EXPECT_EQ(lp_norm_pow(f, 1), Number(6));
    EXPECT_EQ(lp_norm_pow(f, 2), Number(14));
    EXPECT_TRUE(equivalent(f - f, SymplecticFunction()));
    EXPECT_TRUE((f - f).is_zero());
}

TEST(InnerProduct, Examples) {
    const RingSet a = RingSet::from_bar(CylinderBar({{1, rect(0, 0, 1, 1)}, {2, rect(0, 0, 2, 1, 2)}}));
    const auto fa = SymplecticFunction::indicator(a);
    EXPECT_EQ(inner_product(fa, fa), Coefficient(a.measure()));
    const auto far = SymplecticFunction::indicator(RingSet::from_bar(CylinderBar({{1, rect(5, 5, 6, 6)}})));
    EXPECT_EQ(inner_product(fa, far), Coefficient());
    const RingSet b = RingSet::from_bar(CylinderBar({{1, rect(0, 0, 1, 1)}, {2, rect(0, 0, 1, 1)}}));
    const oracle::RawBar ra = {{1, {{0, 0, 8, 8}}}, {2, {{0, 0, 8, 4}}}}, rb = {{1, {{0, 0, 8, 8}}}, {2, {{0, 0, 8, 8}}}};
    const mpq_class overlap = oracle::plane_measure({ra, rb}, [](unsigned m) { return m == 3; });
    EXPECT_EQ(overlap, mpq_class(1, 2));
    EXPECT_EQ(inner_product(fa, SymplecticFunction::indicator(b)), Coefficient(Number(overlap)));
}

TEST(InnerProduct, ConjugateSymmetricAndParseval) {
    oracle::Rng rng(61);
    for (int i = 0; i < 15; ++i) {
        const auto f = random_function(rng), g = random_function(rng);
        EXPECT_EQ(inner_product(f, g), inner_product(g, f).conj());
        EXPECT_EQ(inner_product(f, f), Coefficient(lp_norm_pow(f, 2)));
        Number parseval(0);
        for (const auto& t : f.terms()) parseval += t.coefficient.abs2() * t.support.measure();
        EXPECT_EQ(inner_product(f, f).re, parseval);
    }
}

TEST(InnerProduct, SpaceMismatch) {
    const AnySimpleFunction f = SymplecticFunction::indicator(unit_bar());
    const AnySimpleFunction g = HyperbolicFunction::indicator(radial_bar(RadialSet::single(q(-1), q(1))));
    EXPECT_THROW(inner_product(f, g), space_mismatch);
    EXPECT_EQ(inner_product(g, g), Coefficient(Number(1)));
}

TEST(KoopmanApply, Examples) {
    const auto u = SymplecticFunction::indicator(unit_bar());
    const BlockFlow hyp = BlockFlow::hyperbolic(FrequencySeq::finite({q(1)}));
    EXPECT_EQ(koopman_apply(hyp, Time(), u).terms().front().support.measure(), Number(1));
    const auto moved = koopman_apply(hyp, Time::log(Number(2)), u);
    EXPECT_EQ(lp_norm_pow(moved, 2), Number(1));
    const PlaneSet image = moved.terms().front().support.pieces().front().base().factor(1);
    EXPECT_EQ(image, linear_image(PlaneSet::unit_cell(), Matrix2::hyperbolic(q(5, 4), q(3, 4))).normalized());
    EXPECT_THROW(koopman_apply(BlockFlow::hyperbolic(FrequencySeq::constant(q(1))), Time::log(Number(2)), u), tail_not_preserved);
}

TEST(KoopmanApply, UnitarityAndGroupLaw) {
    oracle::Rng rng(67);
    const BlockFlow flows[] = {BlockFlow::hyperbolic(FrequencySeq::finite({q(1), q(2), q(3)})),
                               BlockFlow::harmonic(FrequencySeq::finite({q(1), q(2), q(3)}))};
    for (int i = 0; i < 12; ++i) {
        const auto f = random_function(rng);
        const BlockFlow& flow = flows[i % 2];
        const long s = oracle::pick(rng, -2, 2), t = oracle::pick(rng, -2, 2);
        auto at = [&](long n) { return i % 2 == 0 ? Time::log(Number(2), q(n)) : Time::angle(q(3, 5), q(4, 5), q(n)); };
        const auto ut = koopman_apply(flow, at(t), f);
        EXPECT_EQ(lp_norm_pow(ut, 2), lp_norm_pow(f, 2));
        const auto composed = koopman_apply(flow, at(s), ut);
        const auto direct = koopman_apply(flow, at(s + t), f);
        EXPECT_TRUE(equivalent(composed, direct));
    }
}

TEST(KoopmanApply, HyperbolicSpace) {
    oracle::Rng rng(71);
    const FrequencySeq a = FrequencySeq::finite({q(1), q(1, 2), q(3)});
    for (int i = 0; i < 15; ++i) {
        HyperbolicFunction f;
        f.add(Coefficient(oracle::rational(rng), oracle::rational(rng)),
              HyperbolicRingSet::from_bar(oracle::to_hyper_bar(oracle::random_raw_hyper_bar(rng))));
        f.add(Coefficient(oracle::rational(rng)), HyperbolicRingSet::from_bar(oracle::to_hyper_bar(oracle::random_raw_hyper_bar(rng))));
        const Number s = oracle::rational(rng), t = oracle::rational(rng);
        const auto ut = koopman_apply(a, Time::plain(t), f);
        EXPECT_EQ(lp_norm_pow(ut, 2), lp_norm_pow(f, 2));
        EXPECT_TRUE(equivalent(koopman_apply(a, Time::plain(s), ut), koopman_apply(a, Time::plain(s + t), f)));
    }
}

TEST(Correlation, ZeroTimeIsOne) {
    const auto table = correlation_study(BlockFlow::hyperbolic(FrequencySeq::constant(q(1))), PlaneSet::unit_cell(), {Time()}, {1, 8, 64});
    for (const auto& row : table.rows) EXPECT_EQ(row.g, Number(1));
}

TEST(Correlation, ConstantFrequenciesDecay) {
    const Time t = Time::log(Number(2));
    const auto table = correlation_study(BlockFlow::hyperbolic(FrequencySeq::constant(q(1))), PlaneSet::unit_cell(), {t}, {1, 2, 8, 64});
    // c(ln 2) = 1 - tanh(ln 2) = 2/5
    EXPECT_EQ(table.factors[0][0], q(2, 5));
    EXPECT_NEAR(table.factors[0][0].to_double(), oracle::unit_cell_hyperbolic_overlap(std::log(2.0)), 1e-15);
    Number prev(1);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.g, pow_int(q(2, 5), row.n));
        EXPECT_LE(row.g, prev);
        prev = row.g;
    }
    EXPECT_LT(table.rows.back().g.to_double(), 1e-3);
}

TEST(Correlation, FiniteFrequenciesStabilize) {
    const BlockFlow flow = BlockFlow::hyperbolic(FrequencySeq::finite({q(1), q(1), q(1)}));
    std::vector<Time> ts;
    for (long n = 1; n <= 64; n *= 2) ts.push_back(Time::log(q(n + 1, n)));
    const auto table = correlation_study(flow, PlaneSet::unit_cell(), ts, {3, 4, 16, 64});
    double prev = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Number g3 = table.rows[4 * i].g;
        for (int j = 1; j < 4; ++j) EXPECT_EQ(table.rows[4 * i + j].g, g3);
        const double c = oracle::unit_cell_hyperbolic_overlap(ts[i].value());
        EXPECT_NEAR(g3.to_double(), c * c * c, 1e-12);
        EXPECT_GT(g3.to_double(), prev);
        prev = g3.to_double();
    }
    EXPECT_GT(prev, 0.95);
}

TEST(HyperbolicCorrelation, Examples) {
    EXPECT_EQ(hyperbolic_correlation(1, 0, 10).value, std::complex<double>(1.0));
    EXPECT_NEAR(std::abs(hyperbolic_correlation(1, std::numbers::pi / 2, 1).value), 0.0, 1e-15);
    const auto g = hyperbolic_correlation(1, 1, 1000);
    EXPECT_LE(std::abs(g.value), 5e-4);
    EXPECT_DOUBLE_EQ(g.bound, 5e-4);
    const double a = 0.7, t = 0.3, x = 40;
    const std::complex<double> expect = std::polar(1.0, a * a * t * t) * (std::sin(2 * t * a * x) / (2 * t * a * x));
    EXPECT_NEAR(std::abs(hyperbolic_correlation(a, t, x).value - expect), 0.0, 1e-15);
}

TEST(Separation, Examples) {
    EXPECT_EQ(separation_witness({{1, 0}}, {{1, 0}}, 1).distance, 0.0);
    EXPECT_EQ(separation_witness({{1, 0}, {2, -1}}, {{1, -1}, {2, -1}}, 1).norm_pow, Number(2));
    EXPECT_DOUBLE_EQ(separation_witness({{1, 0}}, {{1, -1}}, 2).distance, std::sqrt(2.0));
    EXPECT_THROW(separation_witness({{1, 3}}, {{1, 0}}, 1), error);
}

TEST(Separation, RandomSigmaPairs) {
    oracle::Rng rng(73);
    for (int i = 0; i < 20; ++i) {
        std::map<int, int> s1, s2;
        for (int k = 1; k <= 5; ++k) {
            s1[k] = -oracle::pick(rng, 0, 1);
            s2[k] = s1[k];
        }
        const int k = oracle::pick(rng, 1, 5);
        s2[k] = -1 - s1[k];
        for (int p : {1, 2, 4}) {
            const auto r = separation_witness(s1, s2, p);
            EXPECT_EQ(r.norm_pow, Number(2));
            EXPECT_DOUBLE_EQ(r.distance, std::pow(2.0, 1.0 / p));
        }
    }
}

TEST(EigenApply, Examples) {
    const auto zero = eigen_apply(FrequencySeq::finite({q(3)}), Time::plain(q(5)), eigen({}));
    EXPECT_EQ(zero.eigenvalue, std::complex<double>(1.0));
    EXPECT_TRUE(zero.profile_fixed);

    const auto full = eigen_apply(FrequencySeq::finite({q(2)}), Time::angle(q(-1), q(0)), eigen({q(1)}));
    EXPECT_NEAR(std::abs(full.eigenvalue - 1.0), 0.0, 1e-12);
    EXPECT_TRUE(full.phase_consistent);

    for (long s : {1L, 7L, -3L}) {
        const auto res = eigen_apply(FrequencySeq::finite({q(5, 3), q(5, 3)}), Time::plain(q(s, 2)), eigen({q(1), q(-1)}));
        EXPECT_EQ(res.phase, Number(0));
        EXPECT_EQ(res.eigenvalue, std::complex<double>(1.0));
        EXPECT_TRUE(res.profile_fixed);
        EXPECT_TRUE(res.phase_consistent);
    }
    const auto r = eigen_apply(FrequencySeq::finite({q(1), q(2)}), Time::plain(q(1, 4)), eigen({q(3), q(1, 2)}));
    EXPECT_EQ(r.phase, q(1));
    EXPECT_NEAR(std::abs(r.eigenvalue - std::polar(1.0, 1.0)), 0.0, 1e-15);
}

TEST(EigenApply, RejectsAngularProfile) {
    EigenFunction ef{{q(1)}, HyperbolicFunction::indicator(HyperbolicRingSet::from_bar(
                                 HyperbolicBar({{1, {RadialSet::single(q(0), q(1)), EventuallyPeriodicSet(q(2), IntervalSet::single(q(0), q(1)), {})}}})))};
    EXPECT_THROW(ef.validate(), error);
}

TEST(EigenOrthogonality, Examples) {
    const auto e = eigen_orthogonality(eigen({q(2)}), eigen({}), 1000);
    EXPECT_DOUBLE_EQ(e.factor_bound, 5e-4);
    EXPECT_LE(std::abs(e.estimate), e.bound);
    const auto pi = eigen_orthogonality(eigen({Number::approx(std::numbers::pi)}), eigen({}), 1);
    EXPECT_NEAR(pi.factors.at(0), 0.0, 1e-15);
    EXPECT_THROW(eigen_orthogonality(eigen({q(1), q(2)}), eigen({q(1), q(2)}), 10), not_orthogonal);
    const auto two = eigen_orthogonality(eigen({q(1), q(3)}), eigen({q(2), q(3), q(-1)}), 100);
    EXPECT_EQ(two.factors.size(), 2u);
    EXPECT_NEAR(two.factor_bound, 1e-4, 1e-18);
}
