#ifndef QPMUT_PATHALG_HPP
#define QPMUT_PATHALG_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <qpmut/error.hpp>
#include <qpmut/exactlin.hpp>
#include <qpmut/quiver.hpp>

namespace qpmut
{

using quiver_ptr = std::shared_ptr<const quiver>;

inline quiver_ptr share(quiver q)
{
    return std::make_shared<const quiver>(std::move(q));
}

// A path a_1 a_2 ... a_d written left to right in composition order, so
// a_d is traversed first: t(a_k) = h(a_{k+1}). Degree-0 paths are the vertex
// idempotents e_v, with head == tail == v.
struct path {
    std::size_t head = 0;
    std::size_t tail = 0;
    std::vector<std::uint32_t> arrows;

    std::size_t degree() const noexcept
    {
        return arrows.size();
    }
    bool is_cyclic() const noexcept
    {
        return !arrows.empty() && head == tail;
    }

    // Degree first, then arrow sequence, then endpoints.
    friend bool operator<(const path &x, const path &y)
    {
        if (x.arrows.size() != y.arrows.size()) {
            return x.arrows.size() < y.arrows.size();
        }
        if (x.arrows != y.arrows) {
            return x.arrows < y.arrows;
        }
        return std::pair(x.head, x.tail) < std::pair(y.head, y.tail);
    }
    friend bool operator==(const path &, const path &) = default;
};

inline path idempotent_path(std::size_t v)
{
    return {v, v, {}};
}

inline path arrow_path(const quiver &q, std::size_t a)
{
    const auto &ar = q.arrow_at(a);
    return {ar.head, ar.tail, {static_cast<std::uint32_t>(a)}};
}

// Builds a path from a left-to-right arrow sequence, checking composability.
inline path make_path(const quiver &q, const std::vector<std::uint32_t> &arrows)
{
    if (arrows.empty()) {
        throw_input("EmptyPath", "use idempotent_path for degree-0 paths");
    }
    for (auto a : arrows) {
        if (a >= q.num_arrows()) {
            throw_input("UnknownArrow", "arrow index out of range");
        }
    }
    for (std::size_t k = 0; k + 1 < arrows.size(); ++k) {
        if (q.arrow_at(arrows[k]).tail != q.arrow_at(arrows[k + 1]).head) {
            throw_input("NonComposablePath", "arrows '" + q.arrow_at(arrows[k]).id + "' and '"
                                                 + q.arrow_at(arrows[k + 1]).id + "' do not compose");
        }
    }
    return {q.arrow_at(arrows.front()).head, q.arrow_at(arrows.back()).tail, arrows};
}

inline path make_path(const quiver &q, const std::vector<std::string> &ids)
{
    std::vector<std::uint32_t> idx;
    idx.reserve(ids.size());
    for (const auto &id : ids) {
        idx.push_back(static_cast<std::uint32_t>(q.arrow_index(id)));
    }
    return make_path(q, idx);
}

// Human-readable form: arrow ids separated by spaces, or "e_<v>".
inline std::string path_to_string(const quiver &q, const path &p)
{
    if (p.arrows.empty()) {
        return "e_" + q.vertices()[p.head];
    }
    std::string s;
    for (std::size_t i = 0; i < p.arrows.size(); ++i) {
        if (i) {
            s += ' ';
        }
        s += q.arrow_at(p.arrows[i]).id;
    }
    return s;
}

inline bool same_quiver(const quiver_ptr &a, const quiver_ptr &b)
{
    return a == b || (a && b && *a == *b);
}

// Element of the complete path algebra known modulo m^order: a finite
// combination of paths of degree < order with nonzero rational coefficients.
class element
{
public:
    using term_map = std::map<path, rational>;

    element() = default;
    element(quiver_ptr q, int order) : m_q(std::move(q)), m_order(order)
    {
        if (order < 0) {
            throw_input("InvalidOrder", "truncation order must be nonnegative");
        }
    }

    static element arrow(quiver_ptr q, std::size_t a, int order)
    {
        element e(q, order);
        e.add(arrow_path(*q, a), 1);
        return e;
    }

    static element idempotent(quiver_ptr q, std::size_t v, int order)
    {
        element e(std::move(q), order);
        e.add(idempotent_path(v), 1);
        return e;
    }

    static element of_path(quiver_ptr q, path p, int order, const rational &c = 1)
    {
        element e(std::move(q), order);
        e.add(std::move(p), c);
        return e;
    }

    const quiver_ptr &quiver_ref() const noexcept
    {
        return m_q;
    }
    const class quiver &graph() const
    {
        return *m_q;
    }
    int order() const noexcept
    {
        return m_order;
    }
    const term_map &terms() const noexcept
    {
        return m_terms;
    }
    bool is_zero() const noexcept
    {
        return m_terms.empty();
    }
    std::size_t size() const noexcept
    {
        return m_terms.size();
    }

    // Coefficient of p (zero when absent).
    rational coeff(const path &p) const
    {
        const auto it = m_terms.find(p);
        return it == m_terms.end() ? rational(0) : it->second;
    }

    // Adds c * p; paths at or beyond the truncation order are discarded.
    void add(path p, const rational &c)
    {
        if (sgn(c) == 0 || static_cast<int>(p.degree()) >= m_order) {
            return;
        }
        auto [it, inserted] = m_terms.try_emplace(std::move(p), c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) {
                m_terms.erase(it);
            }
        }
    }

    void add_scaled(const element &other, const rational &c)
    {
        check_same(other);
        m_order = std::min(m_order, other.m_order);
        drop_beyond_order();
        if (sgn(c) == 0) {
            return;
        }
        for (const auto &[p, x] : other.m_terms) {
            add(p, x * c);
        }
    }

    // Lowest degree present, or nullopt for zero.
    std::optional<std::size_t> valuation() const
    {
        if (m_terms.empty()) {
            return std::nullopt;
        }
        return m_terms.begin()->first.degree();
    }

    std::size_t max_degree() const
    {
        return m_terms.empty() ? 0 : m_terms.rbegin()->first.degree();
    }

    element degree_part(std::size_t d) const
    {
        element r(m_q, m_order);
        for (const auto &[p, c] : m_terms) {
            if (p.degree() == d) {
                r.m_terms.emplace_hint(r.m_terms.end(), p, c);
            }
        }
        return r;
    }

    // Part of degree >= d.
    element tail_from(std::size_t d) const
    {
        element r(m_q, m_order);
        for (const auto &[p, c] : m_terms) {
            if (p.degree() >= d) {
                r.m_terms.emplace_hint(r.m_terms.end(), p, c);
            }
        }
        return r;
    }

    // Same element viewed modulo m^n for n <= order.
    element truncated(int n) const
    {
        element r(m_q, std::min(n, m_order));
        for (const auto &[p, c] : m_terms) {
            if (static_cast<int>(p.degree()) < r.m_order) {
                r.m_terms.emplace_hint(r.m_terms.end(), p, c);
            }
        }
        return r;
    }

    // Re-declares the truncation order. Raising it asserts that no terms of
    // degree in [order, n) were dropped, which is the caller's claim to make
    // (e.g. for polynomial input).
    element with_order(int n) const
    {
        element r = truncated(n);
        r.m_order = n;
        return r;
    }

    element operator-() const
    {
        element r = *this;
        for (auto &[p, c] : r.m_terms) {
            c = -c;
        }
        return r;
    }

    element &operator+=(const element &o)
    {
        add_scaled(o, 1);
        return *this;
    }
    element &operator-=(const element &o)
    {
        add_scaled(o, -1);
        return *this;
    }
    friend element operator+(element a, const element &b)
    {
        a += b;
        return a;
    }
    friend element operator-(element a, const element &b)
    {
        a -= b;
        return a;
    }
    friend element operator*(const rational &c, element a)
    {
        if (sgn(c) == 0) {
            a.m_terms.clear();
            return a;
        }
        for (auto &[p, x] : a.m_terms) {
            x *= c;
        }
        return a;
    }

    friend bool operator==(const element &a, const element &b)
    {
        return same_quiver(a.m_q, b.m_q) && a.m_order == b.m_order && a.m_terms == b.m_terms;
    }

    // Equality of the two elements modulo m^n.
    friend bool equal_mod(const element &a, const element &b, int n)
    {
        return a.truncated(n).m_terms == b.truncated(n).m_terms;
    }

    void check_same(const element &o) const
    {
        if (!same_quiver(m_q, o.m_q)) {
            throw_input("QuiverMismatch", "elements live over different quivers");
        }
    }

    // Access for algorithms that build terms in bulk; callers keep the
    // invariants (nonzero coefficients, degree < order).
    term_map &mutable_terms() noexcept
    {
        return m_terms;
    }

private:
    void drop_beyond_order()
    {
        for (auto it = m_terms.begin(); it != m_terms.end();) {
            if (static_cast<int>(it->first.degree()) >= m_order) {
                it = m_terms.erase(it);
            } else {
                ++it;
            }
        }
    }

    quiver_ptr m_q;
    int m_order = 0;
    term_map m_terms;
};

inline path concat(const path &x, const path &y)
{
    path r;
    r.head = x.head;
    r.tail = y.tail;
    r.arrows.reserve(x.arrows.size() + y.arrows.size());
    r.arrows.insert(r.arrows.end(), x.arrows.begin(), x.arrows.end());
    r.arrows.insert(r.arrows.end(), y.arrows.begin(), y.arrows.end());
    return r;
}

namespace detail
{

// x * y modulo m^order, no quiver check.
inline void multiply_into(element &out, const element &x, const element &y, const rational &scale = 1)
{
    const auto n = static_cast<std::size_t>(out.order());
    rational c;
    for (const auto &[p, a] : x.terms()) {
        if (p.degree() >= n) {
            break;
        }
        for (const auto &[q, b] : y.terms()) {
            if (p.degree() + q.degree() >= n) {
                break;
            }
            if (p.tail != q.head) {
                continue;
            }
            c = a * b;
            if (scale != 1) {
                c *= scale;
            }
            out.add(concat(p, q), c);
        }
    }
}

} // namespace detail

// Concatenation product; the result is valid modulo m^min(N_x, N_y).
inline element multiply(const element &x, const element &y)
{
    x.check_same(y);
    element r(x.quiver_ref(), std::min(x.order(), y.order()));
    detail::multiply_into(r, x, y);
    return r;
}

inline element operator*(const element &x, const element &y)
{
    return multiply(x, y);
}

// Lexicographically least rotation of a cyclic arrow word.
inline std::vector<std::uint32_t> canonical_rotation(const std::vector<std::uint32_t> &w)
{
    const std::size_t d = w.size();
    std::size_t best = 0;
    for (std::size_t s = 1; s < d; ++s) {
        for (std::size_t i = 0; i < d; ++i) {
            const auto x = w[(s + i) % d];
            const auto y = w[(best + i) % d];
            if (x != y) {
                if (x < y) {
                    best = s;
                }
                break;
            }
        }
    }
    std::vector<std::uint32_t> r(d);
    for (std::size_t i = 0; i < d; ++i) {
        r[i] = w[(best + i) % d];
    }
    return r;
}

inline path rotate_path(const quiver &q, const path &p, std::size_t shift)
{
    const std::size_t d = p.degree();
    std::vector<std::uint32_t> r(d);
    for (std::size_t i = 0; i < d; ++i) {
        r[i] = p.arrows[(shift + i) % d];
    }
    return make_path(q, r);
}

inline path canonical_cycle(const quiver &q, const path &p)
{
    auto w = canonical_rotation(p.arrows);
    const auto v = q.arrow_at(w.front()).head;
    return {v, v, std::move(w)};
}

class potential;
potential canonicalize_potential(const element &x);

// A potential: cyclic terms of degree >= 2, each stored in canonical
// rotation, so cyclically equivalent potentials have identical terms.
class potential
{
public:
    potential() = default;

    static potential zero(quiver_ptr q, int order)
    {
        potential s;
        s.m_elem = element(std::move(q), order);
        return s;
    }

    const element &as_element() const noexcept
    {
        return m_elem;
    }
    const quiver_ptr &quiver_ref() const noexcept
    {
        return m_elem.quiver_ref();
    }
    const class quiver &graph() const
    {
        return m_elem.graph();
    }
    int order() const noexcept
    {
        return m_elem.order();
    }
    const element::term_map &terms() const noexcept
    {
        return m_elem.terms();
    }
    bool is_zero() const noexcept
    {
        return m_elem.is_zero();
    }
    std::optional<std::size_t> valuation() const
    {
        return m_elem.valuation();
    }

    potential truncated(int n) const
    {
        potential r;
        r.m_elem = m_elem.truncated(n);
        return r;
    }
    potential with_order(int n) const
    {
        potential r;
        r.m_elem = m_elem.with_order(n);
        return r;
    }

    friend potential operator+(const potential &a, const potential &b)
    {
        return canonicalize_potential(a.m_elem + b.m_elem);
    }
    friend potential operator-(const potential &a, const potential &b)
    {
        return canonicalize_potential(a.m_elem - b.m_elem);
    }
    friend potential operator*(const rational &c, const potential &a)
    {
        potential r;
        r.m_elem = c * a.m_elem;
        return r;
    }
    friend bool operator==(const potential &a, const potential &b)
    {
        return a.m_elem == b.m_elem;
    }

private:
    friend potential canonicalize_potential(const element &x);
    element m_elem;
};

inline potential canonicalize_potential(const element &x)
{
    const auto &q = x.graph();
    element r(x.quiver_ref(), x.order());
    for (const auto &[p, c] : x.terms()) {
        if (!p.is_cyclic() || p.degree() < 2) {
            throw_input("NonCyclicTerm", "term '" + path_to_string(q, p) + "' is not a cycle of degree >= 2");
        }
        r.add(canonical_cycle(q, p), c);
    }
    potential s;
    s.m_elem = std::move(r);
    return s;
}

// Cyclic derivative with respect to the dual-basis form of arrow a:
// each occurrence a_k = a contributes a_{k+1} ... a_d a_1 ... a_{k-1}.
// The result is valid modulo m^(N-1).
inline element cyclic_derivative(const potential &s, std::size_t a)
{
    const auto &q = s.graph();
    if (a >= q.num_arrows()) {
        throw_input("UnknownArrow", "arrow index out of range");
    }
    const auto &ar = q.arrow_at(a);
    element r(s.quiver_ref(), std::max(0, s.order() - 1));
    for (const auto &[p, c] : s.terms()) {
        const std::size_t d = p.degree();
        for (std::size_t k = 0; k < d; ++k) {
            if (p.arrows[k] != a) {
                continue;
            }
            path w;
            w.head = ar.tail;
            w.tail = ar.head;
            w.arrows.reserve(d - 1);
            for (std::size_t i = 1; i < d; ++i) {
                w.arrows.push_back(p.arrows[(k + i) % d]);
            }
            r.add(std::move(w), c);
        }
    }
    return r;
}

inline element cyclic_derivative(const potential &s, const std::string &arrow_id)
{
    return cyclic_derivative(s, s.graph().arrow_index(arrow_id));
}

// Continuous R-algebra endomorphism given by arrow images. The image of
// a: i -> j must lie in e_j m e_i.
class substitution
{
public:
    substitution() = default;

    substitution(quiver_ptr q, std::vector<element> images) : m_q(std::move(q)), m_images(std::move(images))
    {
        if (m_images.size() != m_q->num_arrows()) {
            throw_input("ShapeMismatch", "substitution needs one image per arrow");
        }
        m_order = std::numeric_limits<int>::max();
        for (std::size_t a = 0; a < m_images.size(); ++a) {
            const auto &img = m_images[a];
            if (!same_quiver(img.quiver_ref(), m_q)) {
                throw_input("QuiverMismatch", "substitution image over a different quiver");
            }
            const auto &ar = m_q->arrow_at(a);
            for (const auto &[p, c] : img.terms()) {
                if (p.degree() == 0 || p.head != ar.head || p.tail != ar.tail) {
                    throw_input("BimoduleMismatch", "image of arrow '" + ar.id + "' contains '"
                                                        + path_to_string(*m_q, p) + "'");
                }
            }
            m_order = std::min(m_order, img.order());
        }
        if (m_images.empty()) {
            m_order = std::numeric_limits<int>::max();
        }
    }

    static substitution identity(quiver_ptr q, int order)
    {
        std::vector<element> imgs;
        for (std::size_t a = 0; a < q->num_arrows(); ++a) {
            imgs.push_back(element::arrow(q, a, order));
        }
        return substitution(q, std::move(imgs));
    }

    const quiver_ptr &quiver_ref() const noexcept
    {
        return m_q;
    }
    const class quiver &graph() const
    {
        return *m_q;
    }
    int order() const noexcept
    {
        return m_order;
    }
    const element &image(std::size_t a) const
    {
        return m_images.at(a);
    }
    const std::vector<element> &images() const noexcept
    {
        return m_images;
    }

    // Block of the degree-1 part between arrows tail -> head:
    // entry (r, c) is the coefficient of arrow r in the image of arrow c.
    rat_matrix linear_block(std::size_t tail, std::size_t head) const
    {
        const auto idx = m_q->arrows_between(tail, head);
        rat_matrix m(idx.size(), idx.size());
        for (std::size_t c = 0; c < idx.size(); ++c) {
            for (std::size_t r = 0; r < idx.size(); ++r) {
                m(r, c) = m_images[idx[c]].coeff(arrow_path(*m_q, idx[r]));
            }
        }
        return m;
    }

    bool is_invertible() const
    {
        const auto n = m_q->num_vertices();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (m_q->multiplicity(i, j) == 0) {
                    continue;
                }
                const auto b = linear_block(i, j);
                if (rank(b) != b.rows()) {
                    return false;
                }
            }
        }
        return true;
    }

    friend bool operator==(const substitution &a, const substitution &b)
    {
        return same_quiver(a.m_q, b.m_q) && a.m_images == b.m_images;
    }

private:
    quiver_ptr m_q;
    std::vector<element> m_images;
    int m_order = 0;
};

// phi(x), valid modulo m^min(N_x, N_phi). Paths sharing a prefix reuse the
// product of the prefix images.
inline element apply_substitution(const substitution &phi, const element &x)
{
    if (!same_quiver(phi.quiver_ref(), x.quiver_ref())) {
        throw_input("QuiverMismatch", "substitution and element live over different quivers");
    }
    const int n = std::min(x.order(), phi.order());
    element out(x.quiver_ref(), n);

    std::vector<const std::pair<const path, rational> *> terms;
    terms.reserve(x.size());
    for (const auto &t : x.terms()) {
        if (static_cast<int>(t.first.degree()) < n) {
            terms.push_back(&t);
        }
    }
    std::sort(terms.begin(), terms.end(), [](auto *l, auto *r) {
        if (l->first.arrows != r->first.arrows) {
            return l->first.arrows < r->first.arrows;
        }
        return l->first.head < r->first.head;
    });

    // prefix[j] = phi(a_1) ... phi(a_{j+1}) for the current path.
    std::vector<element> prefix;
    const std::vector<std::uint32_t> *prev = nullptr;
    for (const auto *t : terms) {
        const auto &p = t->first;
        if (p.degree() == 0) {
            out.add(p, t->second);
            continue;
        }
        std::size_t common = 0;
        if (prev != nullptr) {
            while (common < prev->size() && common < p.degree() && common < prefix.size()
                   && (*prev)[common] == p.arrows[common]) {
                ++common;
            }
        }
        prefix.resize(common);
        for (std::size_t j = common; j < p.degree(); ++j) {
            if (j == 0) {
                prefix.push_back(phi.image(p.arrows[0]).truncated(n));
            } else {
                element next(x.quiver_ref(), n);
                detail::multiply_into(next, prefix.back(), phi.image(p.arrows[j]));
                prefix.push_back(std::move(next));
            }
        }
        for (const auto &[q, c] : prefix.back().terms()) {
            out.add(q, c * t->second);
        }
        prev = &p.arrows;
    }
    return out;
}

// phi applied to a potential; the result is re-canonicalized.
inline potential apply_substitution(const substitution &phi, const potential &s)
{
    return canonicalize_potential(apply_substitution(phi, s.as_element()));
}

// phi o psi: a -> phi(psi(a)).
inline substitution compose(const substitution &phi, const substitution &psi)
{
    if (!same_quiver(phi.quiver_ref(), psi.quiver_ref())) {
        throw_input("QuiverMismatch", "cannot compose substitutions over different quivers");
    }
    std::vector<element> imgs;
    imgs.reserve(psi.images().size());
    for (const auto &img : psi.images()) {
        imgs.push_back(apply_substitution(phi, img));
    }
    return substitution(psi.quiver_ref(), std::move(imgs));
}

// Degree-1 part of every image is the arrow itself.
inline bool is_unitriangular(const substitution &phi)
{
    const auto &q = phi.graph();
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        const auto lin = phi.image(a).degree_part(1);
        if (lin.size() != 1 || lin.coeff(arrow_path(q, a)) != 1) {
            return false;
        }
    }
    return true;
}

// Linear substitution whose degree-1 blocks are the given per-block matrices.
inline substitution linear_substitution(const quiver_ptr &q, int order,
                                        const std::map<std::pair<std::size_t, std::size_t>, rat_matrix> &blocks)
{
    std::vector<element> imgs;
    for (std::size_t a = 0; a < q->num_arrows(); ++a) {
        imgs.emplace_back(q, order);
    }
    for (const auto &[key, m] : blocks) {
        const auto idx = q->arrows_between(key.first, key.second);
        for (std::size_t c = 0; c < idx.size(); ++c) {
            for (std::size_t r = 0; r < idx.size(); ++r) {
                imgs[idx[c]].add(arrow_path(*q, idx[r]), m(r, c));
            }
        }
    }
    return substitution(q, std::move(imgs));
}

// Inverse of an invertible substitution modulo m^N. The linear part is
// inverted exactly; the unitriangular remainder theta is inverted by the
// fixed-point iteration psi(a) = a - psi(u_a), where theta(a) = a + u_a.
inline substitution inverse(const substitution &phi)
{
    const auto &qp = phi.quiver_ref();
    const auto &q = *qp;
    const int n = phi.order();
    std::map<std::pair<std::size_t, std::size_t>, rat_matrix> inv_blocks;
    for (std::size_t i = 0; i < q.num_vertices(); ++i) {
        for (std::size_t j = 0; j < q.num_vertices(); ++j) {
            if (q.multiplicity(i, j) == 0) {
                continue;
            }
            auto inv = invert(phi.linear_block(i, j));
            if (!inv) {
                throw_precondition("NotInvertible", "substitution has a singular linear part");
            }
            inv_blocks.emplace(std::pair(i, j), std::move(*inv));
        }
    }
    const auto lin_inv = linear_substitution(qp, n, inv_blocks);
    const auto theta = compose(phi, lin_inv);

    std::vector<element> u;
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        u.push_back(theta.image(a) - element::arrow(qp, a, n));
    }
    auto psi = substitution::identity(qp, n);
    for (int it = 0; it <= n; ++it) {
        std::vector<element> next;
        for (std::size_t a = 0; a < q.num_arrows(); ++a) {
            next.push_back(element::arrow(qp, a, n) - apply_substitution(psi, u[a]));
        }
        substitution cand(qp, std::move(next));
        if (cand == psi) {
            break;
        }
        psi = std::move(cand);
    }
    return compose(lin_inv, psi);
}

} // namespace qpmut

#endif
