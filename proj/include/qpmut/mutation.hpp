#ifndef QPMUT_MUTATION_HPP
#define QPMUT_MUTATION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <qpmut/error.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>
#include <qpmut/quiver.hpp>
#include <qpmut/reduction.hpp>

namespace qpmut
{

// Where an arrow of a mutated quiver came from.
struct arrow_origin {
    enum class kind { kept, reversed, composite };
    kind how = kind::kept;
    // kept/reversed: the original arrow; composite: {b, a} for [b∘a].
    std::vector<std::string> from;
};

inline const char *to_string(arrow_origin::kind k)
{
    switch (k) {
        case arrow_origin::kind::kept:
            return "kept";
        case arrow_origin::kind::reversed:
            return "reversed";
        case arrow_origin::kind::composite:
            return "composite";
    }
    return "kept";
}

struct premutation_result {
    qp tilde;
    std::map<std::string, arrow_origin> provenance;
};

// Order to which [S] is known when S is known modulo m^n. A dropped cycle
// of length d >= n visiting k p times becomes a cycle of length d - p, so
// the answer is the least number of arrows not ending at k over closed
// walks of length >= n (capped at n; n when no such walk exists).
inline int premutation_order(const quiver &q, std::size_t k, int n)
{
    if (n <= 0) {
        return n;
    }
    const auto nv = q.num_vertices();
    const auto cap = static_cast<std::size_t>(n);
    constexpr int inf = std::numeric_limits<int>::max();
    int best = inf;
    std::vector<int> dist(nv * (cap + 1));
    for (std::size_t s = 0; s < nv; ++s) {
        std::fill(dist.begin(), dist.end(), inf);
        dist[s * (cap + 1)] = 0;
        // Bellman-Ford; weights are 0/1 and the state space is tiny.
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto &a : q.arrows()) {
                const int w = a.head == k ? 0 : 1;
                for (std::size_t l = 0; l <= cap; ++l) {
                    const int from = dist[a.tail * (cap + 1) + l];
                    if (from == inf) {
                        continue;
                    }
                    auto &to = dist[a.head * (cap + 1) + std::min(l + 1, cap)];
                    if (from + w < to) {
                        to = from + w;
                        changed = true;
                    }
                }
            }
        }
        best = std::min(best, dist[s * (cap + 1) + cap]);
    }
    return best == inf ? n : std::min(best, n);
}

// Premutation at k: the arrow span after steps (1) and (2) of quiver
// mutation with potential [S] + sum [b∘a] a* b*.
inline premutation_result premutate(const qp &x, std::size_t k)
{
    const auto &q = *x.graph;
    if (k >= q.num_vertices()) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    if (has_two_cycle_through(q, k)) {
        throw_precondition("TwoCycleAtVertex", "oriented 2-cycle through vertex '" + q.vertices()[k] + "'");
    }
    if (!x.is_reduced()) {
        throw_precondition("NotReduced", "potential has a quadratic part; reduce it first");
    }

    premutation_result res;
    auto tq = share(premutate_quiver(q, k));
    const int n = premutation_order(q, k, x.order());

    for (const auto &a : q.arrows()) {
        if (a.head == k || a.tail == k) {
            res.provenance[starred(a.id)] = {arrow_origin::kind::reversed, {a.id}};
        } else {
            res.provenance[a.id] = {arrow_origin::kind::kept, {a.id}};
        }
    }
    const auto ins = q.arrows_into(k);
    const auto outs = q.arrows_out_of(k);
    for (auto ai : ins) {
        for (auto bi : outs) {
            const auto &a = q.arrow_at(ai).id;
            const auto &b = q.arrow_at(bi).id;
            res.provenance[composite_id(b, a)] = {arrow_origin::kind::composite, {b, a}};
        }
    }

    auto idx = [&](const std::string &id) { return static_cast<std::uint32_t>(tq->arrow_index(id)); };

    element s(tq, n);
    // [S]: rotate each cycle so it does not start at k, then every arrow
    // leaving k is immediately followed by one entering k.
    for (const auto &[p, c] : x.pot.terms()) {
        const auto d = p.degree();
        std::size_t start = 0;
        while (start < d && q.arrow_at(p.arrows[start]).head == k) {
            ++start;
        }
        std::vector<std::uint32_t> word;
        for (std::size_t t = 0; t < d; ++t) {
            const auto cur = p.arrows[(start + t) % d];
            const auto &ca = q.arrow_at(cur);
            if (ca.tail == k) {
                const auto nxt = p.arrows[(start + t + 1) % d];
                word.push_back(idx(composite_id(ca.id, q.arrow_at(nxt).id)));
                ++t;
            } else {
                word.push_back(idx(ca.id));
            }
        }
        s.add(make_path(*tq, word), c);
    }
    for (auto ai : ins) {
        for (auto bi : outs) {
            const auto &a = q.arrow_at(ai).id;
            const auto &b = q.arrow_at(bi).id;
            s.add(make_path(*tq, std::vector<std::uint32_t>{idx(composite_id(b, a)), idx(starred(a)), idx(starred(b))}),
                  1);
        }
    }
    res.tilde = qp(tq, canonicalize_potential(s));
    return res;
}

inline premutation_result premutate(const qp &x, const std::string &k)
{
    return premutate(x, x.graph->vertex_index(k));
}

struct mutation_result {
    qp result;
    premutation_result pre;
    split_result split;
    // Origins of the arrows of the result.
    std::map<std::string, arrow_origin> provenance;
};

// mu_k(A, S): the reduced part of the premutation.
inline mutation_result mutate_qp_detailed(const qp &x, std::size_t k)
{
    mutation_result res;
    res.pre = premutate(x, k);
    if (res.pre.tilde.order() < 3) {
        throw_precondition("InsufficientOrder", "premutated potential is only known modulo m^"
                                                    + std::to_string(res.pre.tilde.order())
                                                    + "; its quadratic part is undetermined");
    }
    res.split = split(res.pre.tilde);
    res.result = res.split.reduced;
    for (const auto &a : res.result.graph->arrows()) {
        res.provenance[a.id] = res.pre.provenance.at(a.id);
    }
    return res;
}

inline qp mutate_qp(const qp &x, std::size_t k)
{
    return mutate_qp_detailed(x, k).result;
}

inline qp mutate_qp(const qp &x, const std::string &k)
{
    return mutate_qp(x, x.graph->vertex_index(k));
}

// Comparison of (A, S) with mu_k^2(A, S) on right-equivalence invariants:
// vertex-labeled arrow multiplicities, graded Jacobian dimensions, and the
// valuation of the potential, all modulo the common truncation order.
struct involution_report {
    std::size_t vertex = 0;
    bool arrows_match = false;
    bool dims_match = false;
    bool profile_match = false;
    int compared_order = 0; // both sides taken modulo m^compared_order
    truncated_quotient dims_original;
    truncated_quotient dims_twice;
    std::optional<std::size_t> valuation_original;
    std::optional<std::size_t> valuation_twice;
    qp once;
    qp twice;

    bool passed() const
    {
        return arrows_match && dims_match && profile_match;
    }
};

namespace detail
{

inline void compare_involution(involution_report &rep, const qp &x, int order)
{
    rep.arrows_match = quivers_equal(*x.graph, *rep.twice.graph);
    rep.compared_order = order;
    rep.dims_original = jacobian_dims(x.truncated(order));
    rep.dims_twice = jacobian_dims(rep.twice.truncated(order));
    rep.dims_match = rep.dims_original.dims == rep.dims_twice.dims;
    rep.valuation_original = x.pot.truncated(order).valuation();
    rep.valuation_twice = rep.twice.pot.truncated(order).valuation();
    rep.profile_match = rep.valuation_original == rep.valuation_twice;
}

inline void mutate_twice(involution_report &rep, const qp &x, std::size_t k)
{
    rep.vertex = k;
    rep.once = mutate_qp(x, k);
    if (has_two_cycle_through(*rep.once.graph, k)) {
        throw_precondition("ObstructedSecondMutation",
                           "mu_k produced an oriented 2-cycle through '" + x.graph->vertices()[k] + "'");
    }
    rep.twice = mutate_qp(rep.once, k);
}

} // namespace detail

// Invariants are compared modulo the order to which mu_k^2(S) is known,
// which can be lower than the input order.
inline involution_report check_involution(const qp &x, std::size_t k)
{
    involution_report rep;
    detail::mutate_twice(rep, x, k);
    detail::compare_involution(rep, x, std::min(x.order(), rep.twice.order()));
    return rep;
}

// For a polynomial potential (exact at every order): raises the working
// order until mu_k^2 is known modulo m^target, then compares there.
// Throws InsufficientOrder if max_order is reached first.
inline involution_report check_involution_lifted(const qp &x, std::size_t k, int target, int max_order)
{
    for (int work = std::max(target, x.order()); work <= max_order; ++work) {
        involution_report rep;
        try {
            detail::mutate_twice(rep, x.with_order(work), k);
        } catch (const error &e) {
            if (e.code() == "InsufficientOrder") {
                continue;
            }
            throw;
        }
        if (rep.twice.order() >= target) {
            detail::compare_involution(rep, x.with_order(work), target);
            return rep;
        }
    }
    throw_precondition("InsufficientOrder", "mu_k^2 not determined modulo m^" + std::to_string(target)
                                                + " below working order " + std::to_string(max_order));
}

inline involution_report check_involution(const qp &x, const std::string &k)
{
    return check_involution(x, x.graph->vertex_index(k));
}

// All cyclic words of degree 2..max_degree, one per rotation class, in
// canonical rotation and ascending (degree, word) order.
inline std::vector<path> enumerate_cycles(const quiver &q, std::size_t max_degree)
{
    std::vector<path> out;
    std::vector<std::uint32_t> word;
    // Depth-first over words whose first arrow is the least arrow of the
    // word; only canonical rotations are kept.
    auto dfs = [&](auto &&self, std::size_t start_vertex, std::size_t cur_tail) -> void {
        if (word.size() >= 2 && cur_tail == start_vertex) {
            if (canonical_rotation(word) == word) {
                out.push_back({start_vertex, start_vertex, word});
            }
        }
        if (word.size() == max_degree) {
            return;
        }
        for (std::size_t x = word.front(); x < q.num_arrows(); ++x) {
            const auto &a = q.arrow_at(x);
            if (a.head != cur_tail) {
                continue;
            }
            word.push_back(static_cast<std::uint32_t>(x));
            self(self, start_vertex, a.tail);
            word.pop_back();
        }
    };
    for (std::size_t first = 0; first < q.num_arrows(); ++first) {
        word.assign(1, static_cast<std::uint32_t>(first));
        const auto &a = q.arrow_at(first);
        dfs(dfs, a.head, a.tail);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Nonzero integer coefficient in [-10^6, 10^6]; mt19937_64 output is fully
// specified by the standard, so the stream is portable.
inline long draw_coefficient(std::mt19937_64 &gen)
{
    constexpr std::uint64_t range = 2000001;
    for (;;) {
        const auto c = static_cast<long>(gen() % range) - 1000000;
        if (c != 0) {
            return c;
        }
    }
}

// One term per cyclic word of degree <= max_degree with a seeded random
// coefficient.
inline potential random_potential(const quiver_ptr &q, std::size_t max_degree, std::uint64_t seed, int order)
{
    std::mt19937_64 gen(seed);
    element e(q, order);
    for (auto &p : enumerate_cycles(*q, max_degree)) {
        e.add(std::move(p), draw_coefficient(gen));
    }
    return canonicalize_potential(e);
}

// A mutation sequence whose reduced result acquired an oriented 2-cycle.
struct genericity_failure {
    std::vector<std::size_t> sequence;
    qp before; // QP the last mutation was applied to
    qp after;
};

struct genericity_report {
    std::size_t sequences = 0;
    int max_order_used = 0;
    std::vector<genericity_failure> failures;
};

// Applies every mutation sequence of length 1..max_length to a QP with
// polynomial potential and records the ones whose result has an oriented
// 2-cycle. Each sequence is first run at start_order; when precision runs
// out it is rerun from the input at a higher order, up to max_order.
inline genericity_report check_genericity(const qp &x, std::size_t max_length, int start_order, int max_order)
{
    genericity_report rep;
    const auto nv = x.graph->num_vertices();
    rep.max_order_used = start_order;

    // Runs `seq` from scratch at increasing orders.
    auto run = [&](const std::vector<std::size_t> &seq, int from) -> std::pair<qp, qp> {
        for (int work = from; work <= max_order; ++work) {
            try {
                qp prev = x.with_order(work);
                qp cur = prev;
                for (auto k : seq) {
                    prev = cur;
                    cur = mutate_qp(prev, k);
                }
                rep.max_order_used = std::max(rep.max_order_used, work);
                return {prev, cur};
            } catch (const error &e) {
                if (e.code() != "InsufficientOrder") {
                    throw;
                }
            }
        }
        throw_precondition("InsufficientOrder", "mutation sequence not determined below order "
                                                    + std::to_string(max_order));
    };

    // Depth-first with the prefix result reused while precision allows.
    std::vector<std::size_t> seq;
    auto dfs = [&](auto &&self, const qp &cur, int work) -> void {
        if (seq.size() == max_length) {
            return;
        }
        for (std::size_t k = 0; k < nv; ++k) {
            seq.push_back(k);
            qp next;
            qp before = cur;
            int next_work = work;
            try {
                next = mutate_qp(cur, k);
            } catch (const error &e) {
                if (e.code() != "InsufficientOrder") {
                    throw;
                }
                next_work = work + 1;
                std::tie(before, next) = run(seq, next_work);
            }
            ++rep.sequences;
            if (!is_two_acyclic(*next.graph)) {
                rep.failures.push_back({seq, before, next});
            } else {
                self(self, next, next_work);
            }
            seq.pop_back();
        }
    };
    dfs(dfs, x.with_order(start_order), start_order);
    return rep;
}

} // namespace qpmut

#endif
