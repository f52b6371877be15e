#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "symlab/flows.hpp"

using namespace symlab;

namespace {

Number q(long n, long d = 1) { return Number::ratio(n, d); }

const Time kLn2 = Time::log(Number(2));
const Time kPythagorean = Time::angle(q(3, 5), q(4, 5));

} // namespace

TEST(Time, ExactHyperbolicAndCircularPairs) {
    const auto [ch, sh] = hyperbolic_pair(Number(1), kLn2);
    EXPECT_EQ(ch, q(5, 4));
    EXPECT_EQ(sh, q(3, 4));
    const auto [c2, s2] = hyperbolic_pair(Number(2), kLn2);  // t = 2 ln 2: (17/8, 15/8)
    EXPECT_EQ(c2, q(17, 8));
    EXPECT_EQ(s2, q(15, 8));
    const auto [c, s] = circular_pair(Number(2), kPythagorean);  // double angle
    EXPECT_EQ(c, q(-7, 25));
    EXPECT_EQ(s, q(24, 25));
    EXPECT_THROW(Time::angle(q(1, 2), q(1, 2)), error);
}

TEST(Time, NonIntegerProductFallsBackToFloat) {
    const auto [ch, sh] = hyperbolic_pair(q(1, 2), kLn2);
    EXPECT_FALSE(ch.is_exact());
    EXPECT_NEAR(ch.to_double(), std::cosh(0.5 * std::log(2.0)), 1e-14);
    EXPECT_NEAR(sh.to_double(), std::sinh(0.5 * std::log(2.0)), 1e-14);
}

TEST(FrequencySeq, Classification) {
    EXPECT_TRUE(FrequencySeq::finite({q(1), q(2)}).in_l_infinity());
    EXPECT_TRUE(FrequencySeq::constant(q(3)).in_l_infinity());
    EXPECT_TRUE(FrequencySeq::geometric(q(1), q(1, 2)).in_l_infinity());
    EXPECT_FALSE(FrequencySeq::linear(q(1)).in_l_infinity());
    EXPECT_FALSE(FrequencySeq::power(q(1), q(1, 2)).in_l_infinity());
    EXPECT_EQ(FrequencySeq::linear(q(3)).operator()(4), q(12));
    EXPECT_EQ(*FrequencySeq::finite({q(1), q(0), q(2), q(0)}).support_bound(), 4);
}

TEST(Trajectory, Examples) {
    const PhasePoint z({{q(1), q(0)}});
    EXPECT_EQ(trajectory(BlockFlow::hyperbolic(FrequencySeq::finite({q(1)})), z, Time()), z);
    const PhasePoint h = trajectory(BlockFlow::hyperbolic(FrequencySeq::finite({q(1)})), z, kLn2);
    EXPECT_EQ(h.head()[0].q, q(5, 4));
    EXPECT_EQ(h.head()[0].p, q(3, 4));
    const PhasePoint c = trajectory(BlockFlow::harmonic(FrequencySeq::finite({q(1)})), z, kPythagorean);
    EXPECT_EQ(c.head()[0].q, q(3, 5));
    EXPECT_EQ(c.head()[0].p, q(4, 5));
}

TEST(Trajectory, TranslationFlow) {
    const PhasePoint h({{q(1), q(2)}, {q(0), q(-1)}});
    const PhasePoint z({{q(1, 2), q(0)}});
    const PhasePoint zt = trajectory(BlockFlow::translation(h), z, Time::plain(q(3)));
    EXPECT_EQ(zt.head()[0].q, q(7, 2));
    EXPECT_EQ(zt.head()[0].p, q(6));
    EXPECT_EQ(zt.head()[1].p, q(-3));
}

TEST(Trajectory, HilbertDomainLeavesPhaseSpace) {
    const PhasePoint z({}, Envelope::exponential(1, 2));
    const BlockFlow f = BlockFlow::hyperbolic(FrequencySeq::linear(q(1)), FlowDomain::hilbert);
    EXPECT_NO_THROW(trajectory(f, z, Time::plain(q(19, 10))));
    EXPECT_THROW(trajectory(f, z, Time::plain(q(2))), left_phase_space);
    EXPECT_THROW(trajectory(f, z, Time::plain(q(-21, 10))), left_phase_space);
    const BlockFlow g = BlockFlow::hyperbolic(FrequencySeq::linear(q(1)), FlowDomain::extended);
    EXPECT_NO_THROW(trajectory(g, z, Time::plain(q(3))));
}

TEST(ModeEnergy, Examples) {
    const FrequencySeq a = FrequencySeq::finite({q(1)});
    const PhasePoint z({{q(1), q(0)}});
    EXPECT_EQ(mode_energy(z, 1, OscillatorKind::hyperbolic, a), q(-1, 2));
    EXPECT_EQ(mode_energy(PhasePoint({{q(0), q(0)}}), 1, OscillatorKind::hyperbolic, a), q(0));
    const PhasePoint zt = trajectory(BlockFlow::hyperbolic(a), z, kLn2);
    EXPECT_EQ(mode_energy(zt, 1, OscillatorKind::hyperbolic, a), q(-1, 2));
    EXPECT_EQ(mode_energy(z, 1, OscillatorKind::harmonic, FrequencySeq::finite({q(3)})), q(3));
}

TEST(TotalEnergy, Examples) {
    const FrequencySeq lin = FrequencySeq::linear(q(1));
    EXPECT_FALSE(total_energy(PhasePoint({{q(1), q(2)}}), OscillatorKind::harmonic, lin).divergent);
    EXPECT_EQ(total_energy(PhasePoint({{q(1), q(2)}}), OscillatorKind::harmonic, lin).head, q(5));
    const auto conv = total_energy(PhasePoint({}, Envelope::exponential(1, 0.5)), OscillatorKind::harmonic, lin);
    EXPECT_FALSE(conv.divergent);
    // sum k e^{-k} from k = 1
    const double exact = std::exp(-1.0) / std::pow(1 - std::exp(-1.0), 2);
    EXPECT_GE(conv.tail_bound, exact - 1e-9);
    EXPECT_TRUE(total_energy(PhasePoint({}, Envelope::power(1, 0.5)), OscillatorKind::harmonic, lin).divergent);
}

TEST(ExistenceInterval, Examples) {
    const PhasePoint e2({}, Envelope::exponential(1, 2));
    const auto whole = existence_interval(e2, FrequencySeq::finite({q(5)}));
    EXPECT_TRUE(whole.is_whole_line());
    const auto iv = existence_interval(e2, FrequencySeq::linear(q(1)));
    EXPECT_EQ(iv.lower, -2.0);
    EXPECT_EQ(iv.upper, 2.0);
    EXPECT_FALSE(iv.contains(2.0));
    const auto half = existence_interval(PhasePoint({}, Envelope::exponential(1, 1)), FrequencySeq::linear(q(2)));
    EXPECT_EQ(half.upper, 0.5);
    const auto none = existence_interval(PhasePoint({}, Envelope::power(1, 1)), FrequencySeq::linear(q(1)));
    EXPECT_EQ(none.lower, 0.0);
    EXPECT_EQ(none.upper, 0.0);
    EXPECT_TRUE(none.contains(0.0));
    EXPECT_FALSE(none.contains(1e-9));
}

TEST(EnergyTable, AgreesWithExistenceInterval) {
    const PhasePoint z({}, Envelope::exponential(1, 2));
    const FrequencySeq a = FrequencySeq::linear(q(1));
    const auto rows = energy_growth_table(z, a, {0.0, 1.0, 3.0}, {10, 20, 40});
    // t = 0: sum_{k<=N} e^{-4k}
    double s0 = 0;
    for (int k = 1; k <= 10; ++k) s0 += std::exp(-4.0 * k);
    EXPECT_NEAR(rows[0].partial_sum, s0, 1e-15);
    // t = 1: bounded by the closed-form tail bound and converging
    EXPECT_LE(rows[5].partial_sum, energy_bound(z, a, 1.0));
    EXPECT_NEAR(rows[4].partial_sum, rows[5].partial_sum, 1e-12);
    // t = 3: log growth ~ 2N (3 - 2)
    EXPECT_NEAR(rows[8].log_partial_sum - rows[7].log_partial_sum, 2.0 * 20, 1.0);
}

TEST(EnergyTable, UnrealizedTailIsUnsupported) {
    Envelope e = Envelope::exponential(1, 2);
    e.realized = false;
    EXPECT_THROW(energy_growth_table(PhasePoint({}, e), FrequencySeq::linear(q(1)), {1.0}, {3}), unsupported_combination);
}

TEST(PseudoSymplectic, Examples) {
    const PhasePoint e1({{q(1), q(0)}}), f1({{q(0), q(1)}});
    const auto w = pseudo_symplectic(e1, f1);
    EXPECT_TRUE(w.in_domain());
    EXPECT_EQ(w.value, q(1));
    EXPECT_EQ(pseudo_symplectic(f1, e1).value, q(-1));
    const PhasePoint z({{q(1), q(2)}, {q(3), q(-1)}}), y({{q(2), q(5)}});
    EXPECT_EQ(pseudo_symplectic(z, y).value, q(1 * 5 - 2 * 2));
    Envelope a = Envelope::power(1, 0.25, 1, 0), b = Envelope::power(1, 0.25, 0, 1);
    EXPECT_FALSE(pseudo_symplectic(PhasePoint({}, a), PhasePoint({}, b)).in_domain());
    EXPECT_TRUE(pseudo_symplectic(PhasePoint({}, Envelope::exponential(1, 1)), PhasePoint({}, b)).in_domain());
}

TEST(PseudoSymplectic, InvariantUnderHyperbolicFlow) {
    const FrequencySeq a = FrequencySeq::finite({q(1), q(2), q(3)});
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int i = 0; i < 20; ++i) {
        const PhasePoint z({{q(d(rng), 3), q(d(rng), 2)}, {q(d(rng)), q(d(rng), 5)}, {q(d(rng)), q(d(rng))}});
        const PhasePoint w({{q(d(rng)), q(d(rng), 7)}, {q(d(rng), 4), q(d(rng))}});
        const Time t = Time::log(Number(2), q(d(rng)));
        const BlockFlow f = BlockFlow::hyperbolic(a);
        EXPECT_EQ(pseudo_symplectic(trajectory(f, z, t), trajectory(f, w, t)).value, pseudo_symplectic(z, w).value);
    }
}

TEST(ActionAngle, Examples) {
    const auto aa = to_action_angle(PhasePoint({{q(1), q(0)}, {q(5, 4), q(3, 4)}, {q(0), q(0)}}));
    EXPECT_EQ(aa[0].r, 1.0);
    EXPECT_EQ(aa[0].phi, 0.0);
    EXPECT_NEAR(aa[1].r, 1.0, 1e-15);
    EXPECT_NEAR(aa[1].phi, std::log(2.0), 1e-15);
    EXPECT_EQ(aa[2].r, 0.0);
    EXPECT_THROW(to_action_angle(PhasePoint({{q(1), q(1)}})), degenerate_set);
    EXPECT_THROW(to_action_angle(PhasePoint({{q(1), q(2)}})), degenerate_set);
}

TEST(ActionAngle, ConjugatesTheFlow) {
    const FrequencySeq a = FrequencySeq::finite({q(1), q(1, 3)});
    const PhasePoint z({{q(2), q(1, 2)}, {q(-3), q(1)}});
    for (double t : {0.0, 0.3, -0.7, 1.1}) {
        const PhasePoint lhs = from_action_angle(flow_in_action_angle(to_action_angle(z), a, t));
        const PhasePoint rhs = trajectory(BlockFlow::hyperbolic(a), z, Time::approx(t));
        for (int k = 0; k < 2; ++k) {
            EXPECT_NEAR(lhs.head()[k].q.to_double(), rhs.head()[k].q.to_double(), 1e-12);
            EXPECT_NEAR(lhs.head()[k].p.to_double(), rhs.head()[k].p.to_double(), 1e-12);
        }
    }
    const auto moved = flow_in_action_angle({{1, 0}}, FrequencySeq::finite({q(1)}), std::log(2.0));
    EXPECT_NEAR(moved[0].phi, std::log(2.0), 1e-15);
}

TEST(BlockFlow, DeterminantAndGroupLaw) {
    const FrequencySeq a = FrequencySeq::finite({q(1), q(2), q(3)});
    for (long s1 = -3; s1 <= 3; ++s1) {
        for (long s2 = -3; s2 <= 3; ++s2) {
            const Time t1 = Time::log(Number(2), q(s1)), t2 = Time::log(Number(2), q(s2));
            for (int k = 1; k <= 3; ++k) {
                const Matrix2 m = BlockFlow::hyperbolic(a).block(k, t1).linear;
                EXPECT_EQ(m.det(), Number(1));
                EXPECT_EQ(BlockFlow::hyperbolic(a).block(k, t1 + t2).linear, m * BlockFlow::hyperbolic(a).block(k, t2).linear);
            }
        }
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const Time t1 = Time::approx(u(rng)), t2 = Time::approx(u(rng));
        const BlockFlow h = BlockFlow::harmonic(a);
        const Matrix2 lhs = h.block(2, t1 + t2).linear;
        const Matrix2 rhs = h.block(2, t1).linear * h.block(2, t2).linear;
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
        EXPECT_NEAR(lhs.det().to_double(), 1.0, 1e-12);
    }
}

TEST(BlockFlow, NontrivialIndices) {
    EXPECT_FALSE(BlockFlow::hyperbolic(FrequencySeq::constant(q(1))).nontrivial_indices(kLn2).has_value());
    const auto idx = BlockFlow::hyperbolic(FrequencySeq::finite({q(1), q(0), q(2)})).nontrivial_indices(kLn2);
    ASSERT_TRUE(idx.has_value());
    EXPECT_EQ(*idx, (std::vector<int>{1, 3}));
    EXPECT_TRUE(BlockFlow::hyperbolic(FrequencySeq::constant(q(1))).nontrivial_indices(Time())->empty());
}

TEST(InE2, EnvelopePredicate) {
    EXPECT_TRUE(in_e2(PhasePoint({}, Envelope::exponential(1, 1)), FrequencySeq::linear(q(1))));
    EXPECT_FALSE(in_e2(PhasePoint({}, Envelope::power(1, 1)), FrequencySeq::linear(q(1))));
    EXPECT_TRUE(in_e2(PhasePoint({}, Envelope::power(1, 2)), FrequencySeq::linear(q(1))));
}
