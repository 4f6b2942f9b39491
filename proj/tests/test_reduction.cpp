#include <gtest/gtest.h>

#include <random>

#include <qpmut/jacobian.hpp>
#include <qpmut/mutation.hpp>
#include <qpmut/reduction.hpp>

#include "support.hpp"

using namespace qpmut;
using support::make_q;
using support::make_qp;

namespace
{

// Number of trivial pairs per unordered vertex pair.
std::map<std::pair<std::size_t, std::size_t>, int> pair_counts(const qp &x, const split_result &sr)
{
    std::map<std::pair<std::size_t, std::size_t>, int> out;
    for (const auto &p : sr.trivial) {
        const auto &a = x.graph->arrow_at(x.graph->arrow_index(p.a));
        out[{std::min(a.tail, a.head), std::max(a.tail, a.head)}]++;
    }
    return out;
}

} // namespace

TEST(Split, AlreadyReduced)
{
    const auto x = support::triangle_qp(8);
    const auto sr = split(x);
    EXPECT_TRUE(sr.trivial.empty());
    EXPECT_TRUE(quivers_equal(*sr.reduced.graph, *x.graph));
    EXPECT_EQ(*sr.reduced.graph, *x.graph);
    EXPECT_EQ(embed_potential(sr.reduced.pot, x.graph), x.pot);
    EXPECT_EQ(sr.witness, substitution::identity(x.graph, 8));
    EXPECT_TRUE(verify_split(x, sr));
}

TEST(Split, TrivialTwoCycle)
{
    const auto x = make_qp(support::two_cycle(), {{{"b", "a"}, 1}}, 8);
    const auto sr = split(x);
    ASSERT_EQ(sr.trivial.size(), 1u);
    EXPECT_EQ(sr.trivial[0], (trivial_pair{"a", "b"}));
    EXPECT_EQ(sr.reduced.graph->num_arrows(), 0u);
    EXPECT_TRUE(sr.reduced.pot.is_zero());
    EXPECT_TRUE(verify_split(x, sr));
}

TEST(Split, PremutatedTriangle)
{
    const auto pre = premutate(support::triangle_qp(8), "2");
    const auto sr = split(pre.tilde);
    ASSERT_EQ(sr.trivial.size(), 1u);
    EXPECT_EQ(sr.trivial[0], (trivial_pair{"[b∘a]", "c"}));
    const quiver expect({"1", "2", "3"}, {{"a*", "2", "1"}, {"b*", "3", "2"}});
    EXPECT_EQ(*sr.reduced.graph, expect);
    EXPECT_TRUE(sr.reduced.pot.is_zero());
    EXPECT_EQ(sr.passes, 1);
    EXPECT_TRUE(verify_split(pre.tilde, sr));
}

TEST(VerifySplit, TamperedWitnessFails)
{
    // Quartic contamination through the trivial arrows.
    const auto x = make_qp(support::two_cycle(), {{{"b", "a"}, 1}, {{"b", "a", "b", "a"}, 1}}, 8);
    auto sr = split(x);
    ASSERT_TRUE(verify_split(x, sr));
    ASSERT_GE(sr.passes, 1);
    sr.witness = sr.basis_change;
    EXPECT_FALSE(verify_split(x, sr));
}

TEST(VerifySplit, IdentityWitnessOnReduced)
{
    const auto x = support::triangle_qp(8);
    split_result sr;
    sr.reduced = x;
    sr.witness = substitution::identity(x.graph, 8);
    sr.basis_change = sr.witness;
    EXPECT_TRUE(verify_split(x, sr));
}

TEST(Split, NonUnitQuadraticPairing)
{
    // Two parallel 2-cycles paired through a full-rank 2x2 matrix, with cubic terms.
    const auto q = make_q({"1", "2", "3"}, {{"a1", "1", "2"},
                                            {"a2", "1", "2"},
                                            {"b1", "2", "1"},
                                            {"b2", "2", "1"},
                                            {"c", "2", "3"},
                                            {"d", "3", "1"}});
    const auto x = make_qp(q,
                           {{{"b1", "a1"}, 2},
                            {{"b1", "a2"}, 1},
                            {{"b2", "a1"}, 1},
                            {{"b2", "a2"}, 1},
                            {{"d", "c", "a1"}, 1},
                            {{"d", "c", "a2"}, -3},
                            {{"b1", "a1", "b2", "a2"}, 5}},
                           8);
    const auto sr = split(x);
    EXPECT_EQ(sr.trivial.size(), 2u);
    EXPECT_TRUE(verify_split(x, sr));
    EXPECT_TRUE(sr.reduced.is_reduced());
    EXPECT_EQ(sr.reduced.graph->num_arrows(), 2u);
    EXPECT_EQ(jacobian_dims(x).dims, jacobian_dims(sr.reduced).dims);
}

TEST(Split, RankDeficientPairing)
{
    // Rank-1 pairing between two 2-cycles leaves one 2-cycle in the reduced part.
    const auto q = make_q({"1", "2"}, {{"a1", "1", "2"}, {"a2", "1", "2"}, {"b1", "2", "1"}, {"b2", "2", "1"}});
    const auto x = make_qp(q,
                           {{{"b1", "a1"}, 1},
                            {{"b1", "a2"}, 2},
                            {{"b2", "a1"}, 2},
                            {{"b2", "a2"}, 4},
                            {{"b1", "a1", "b2", "a2"}, 1}},
                           8);
    const auto sr = split(x);
    EXPECT_EQ(sr.trivial.size(), 1u);
    EXPECT_TRUE(verify_split(x, sr));
    EXPECT_TRUE(sr.reduced.is_reduced());
    EXPECT_FALSE(is_two_acyclic(*sr.reduced.graph));
}

TEST(SplitProperty, IdempotentAndDetermined)
{
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        const auto q = support::random_quiver(rng, 3 + t % 2, 2);
        const auto tq = share(premutate_quiver(*q, rng() % q->num_vertices()));
        const qp x(tq, random_potential(tq, 3, rng(), 6));
        const auto sr = split(x);
        ASSERT_TRUE(verify_split(x, sr));
        ASSERT_TRUE(sr.reduced.is_reduced());

        const auto again = split(sr.reduced);
        EXPECT_TRUE(again.trivial.empty());
        EXPECT_EQ(again.witness, substitution::identity(sr.reduced.graph, sr.reduced.order()));

        const auto phi = support::random_substitution(rng, tq, 6, false);
        const qp y(tq, apply_substitution(phi, x.pot));
        const auto sy = split(y);
        EXPECT_TRUE(verify_split(y, sy));
        EXPECT_EQ(pair_counts(x, sr), pair_counts(y, sy));
        EXPECT_EQ(jacobian_dims(sr.reduced).dims, jacobian_dims(sy.reduced).dims);
        EXPECT_EQ(jacobian_dims(x).dims, jacobian_dims(sr.reduced).dims);
    }
}
