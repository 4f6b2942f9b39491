#ifndef QPMUT_QUIVER_HPP
#define QPMUT_QUIVER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <qpmut/error.hpp>

namespace qpmut
{

// Arrow as given by the user: endpoints named by vertex id.
struct arrow_spec {
    std::string id;
    std::string tail;
    std::string head;
};

// Arrow with endpoints resolved to vertex indices.
struct arrow {
    std::string id;
    std::size_t tail;
    std::size_t head;
};

// A loop-free quiver. Vertices keep the order they were given in; arrows are
// stored sorted by id, so an arrow's index order coincides with id order.
class quiver
{
public:
    quiver() = default;

    quiver(std::vector<std::string> vertices, const std::vector<arrow_spec> &arrows)
        : m_vertices(std::move(vertices))
    {
        for (std::size_t i = 0; i < m_vertices.size(); ++i) {
            if (!m_vertex_index.emplace(m_vertices[i], i).second) {
                throw_input("DuplicateVertex", "vertex '" + m_vertices[i] + "' listed twice");
            }
        }
        m_arrows.reserve(arrows.size());
        for (const auto &a : arrows) {
            m_arrows.push_back({a.id, vertex_index(a.tail), vertex_index(a.head)});
        }
        finish();
    }

    // Arrows already resolved against `vertices`.
    static quiver from_resolved(std::vector<std::string> vertices, std::vector<arrow> arrows)
    {
        quiver q;
        q.m_vertices = std::move(vertices);
        for (std::size_t i = 0; i < q.m_vertices.size(); ++i) {
            if (!q.m_vertex_index.emplace(q.m_vertices[i], i).second) {
                throw_input("DuplicateVertex", "vertex '" + q.m_vertices[i] + "' listed twice");
            }
        }
        for (const auto &a : arrows) {
            if (a.tail >= q.m_vertices.size() || a.head >= q.m_vertices.size()) {
                throw_input("UnknownVertex", "arrow '" + a.id + "' has an endpoint out of range");
            }
        }
        q.m_arrows = std::move(arrows);
        q.finish();
        return q;
    }

    const std::vector<std::string> &vertices() const noexcept
    {
        return m_vertices;
    }
    const std::vector<arrow> &arrows() const noexcept
    {
        return m_arrows;
    }
    std::size_t num_vertices() const noexcept
    {
        return m_vertices.size();
    }
    std::size_t num_arrows() const noexcept
    {
        return m_arrows.size();
    }
    const arrow &arrow_at(std::size_t i) const
    {
        return m_arrows.at(i);
    }

    std::size_t vertex_index(const std::string &id) const
    {
        const auto it = m_vertex_index.find(id);
        if (it == m_vertex_index.end()) {
            throw_input("UnknownVertex", "no vertex '" + id + "'");
        }
        return it->second;
    }
    bool has_vertex(const std::string &id) const
    {
        return m_vertex_index.count(id) != 0;
    }

    std::size_t arrow_index(const std::string &id) const
    {
        const auto it = m_arrow_index.find(id);
        if (it == m_arrow_index.end()) {
            throw_input("UnknownArrow", "no arrow '" + id + "'");
        }
        return it->second;
    }
    bool has_arrow(const std::string &id) const
    {
        return m_arrow_index.count(id) != 0;
    }

    // Number of arrows i -> j.
    std::size_t multiplicity(std::size_t i, std::size_t j) const
    {
        return m_mult[i * m_vertices.size() + j];
    }

    // Arrow indices i -> j in ascending id order.
    std::vector<std::size_t> arrows_between(std::size_t tail, std::size_t head) const
    {
        std::vector<std::size_t> r;
        for (std::size_t a = 0; a < m_arrows.size(); ++a) {
            if (m_arrows[a].tail == tail && m_arrows[a].head == head) {
                r.push_back(a);
            }
        }
        return r;
    }

    std::vector<std::size_t> arrows_into(std::size_t v) const
    {
        std::vector<std::size_t> r;
        for (std::size_t a = 0; a < m_arrows.size(); ++a) {
            if (m_arrows[a].head == v) {
                r.push_back(a);
            }
        }
        return r;
    }

    std::vector<std::size_t> arrows_out_of(std::size_t v) const
    {
        std::vector<std::size_t> r;
        for (std::size_t a = 0; a < m_arrows.size(); ++a) {
            if (m_arrows[a].tail == v) {
                r.push_back(a);
            }
        }
        return r;
    }

    bool is_sink(std::size_t v) const
    {
        return arrows_out_of(v).empty();
    }
    bool is_source(std::size_t v) const
    {
        return arrows_into(v).empty();
    }

    // Structural equality including arrow ids.
    friend bool operator==(const quiver &a, const quiver &b)
    {
        if (a.m_vertices != b.m_vertices || a.m_arrows.size() != b.m_arrows.size()) {
            return false;
        }
        for (std::size_t i = 0; i < a.m_arrows.size(); ++i) {
            const auto &x = a.m_arrows[i];
            const auto &y = b.m_arrows[i];
            if (x.id != y.id || x.tail != y.tail || x.head != y.head) {
                return false;
            }
        }
        return true;
    }

private:
    void finish()
    {
        std::sort(m_arrows.begin(), m_arrows.end(), [](const arrow &x, const arrow &y) { return x.id < y.id; });
        const std::size_t n = m_vertices.size();
        m_mult.assign(n * n, 0);
        for (std::size_t i = 0; i < m_arrows.size(); ++i) {
            const auto &a = m_arrows[i];
            if (!m_arrow_index.emplace(a.id, i).second) {
                throw_input("DuplicateArrow", "arrow id '" + a.id + "' used twice");
            }
            if (a.head == a.tail) {
                throw_precondition("LoopError", "arrow '" + a.id + "' is a loop at '" + m_vertices[a.head] + "'");
            }
            ++m_mult[a.tail * n + a.head];
        }
    }

    std::vector<std::string> m_vertices;
    std::vector<arrow> m_arrows;
    std::unordered_map<std::string, std::size_t> m_vertex_index;
    std::unordered_map<std::string, std::size_t> m_arrow_index;
    std::vector<std::size_t> m_mult;
};

// b(i, j) = #{arrows j -> i} - #{arrows i -> j}.
class exchange_matrix
{
public:
    exchange_matrix() = default;
    explicit exchange_matrix(std::size_t n) : m_n(n), m_b(n * n, 0) {}

    std::size_t size() const noexcept
    {
        return m_n;
    }
    std::int64_t &operator()(std::size_t i, std::size_t j)
    {
        return m_b[i * m_n + j];
    }
    std::int64_t operator()(std::size_t i, std::size_t j) const
    {
        return m_b[i * m_n + j];
    }
    bool is_skew_symmetric() const
    {
        for (std::size_t i = 0; i < m_n; ++i) {
            for (std::size_t j = 0; j < m_n; ++j) {
                if ((*this)(i, j) != -(*this)(j, i)) {
                    return false;
                }
            }
        }
        return true;
    }
    friend bool operator==(const exchange_matrix &, const exchange_matrix &) = default;

private:
    std::size_t m_n = 0;
    std::vector<std::int64_t> m_b;
};

inline std::string starred(const std::string &id)
{
    return id + "*";
}

// Composite arrow id for "b after a".
inline std::string composite_id(const std::string &b, const std::string &a)
{
    return "[" + b + "∘" + a + "]";
}

inline bool has_two_cycle_through(const quiver &q, std::size_t k)
{
    for (std::size_t i = 0; i < q.num_vertices(); ++i) {
        if (q.multiplicity(i, k) > 0 && q.multiplicity(k, i) > 0) {
            return true;
        }
    }
    return false;
}

inline bool has_two_cycle_through(const quiver &q, const std::string &k)
{
    return has_two_cycle_through(q, q.vertex_index(k));
}

inline bool is_two_acyclic(const quiver &q)
{
    for (std::size_t i = 0; i < q.num_vertices(); ++i) {
        if (has_two_cycle_through(q, i)) {
            return false;
        }
    }
    return true;
}

// Same vertex list and same arrow multiplicity for every ordered pair;
// arrow ids are ignored.
inline bool quivers_equal(const quiver &a, const quiver &b)
{
    if (a.vertices() != b.vertices()) {
        return false;
    }
    const auto n = a.num_vertices();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a.multiplicity(i, j) != b.multiplicity(i, j)) {
                return false;
            }
        }
    }
    return true;
}

// Steps (1) and (2) of quiver mutation at k: composites [b∘a] for every
// a: j -> k, b: k -> i, then every arrow at k reversed and starred.
inline quiver premutate_quiver(const quiver &q, std::size_t k)
{
    if (k >= q.num_vertices()) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    if (has_two_cycle_through(q, k)) {
        throw_precondition("TwoCycleAtVertex", "oriented 2-cycle through vertex '" + q.vertices()[k] + "'");
    }
    std::vector<arrow> out;
    const auto ins = q.arrows_into(k);
    const auto outs = q.arrows_out_of(k);
    for (const auto &a : q.arrows()) {
        if (a.head == k || a.tail == k) {
            out.push_back({starred(a.id), a.head, a.tail});
        } else {
            out.push_back(a);
        }
    }
    for (auto ai : ins) {
        for (auto bi : outs) {
            const auto &a = q.arrow_at(ai);
            const auto &b = q.arrow_at(bi);
            out.push_back({composite_id(b.id, a.id), a.tail, b.head});
        }
    }
    return quiver::from_resolved(q.vertices(), std::move(out));
}

// Step (3): for each vertex pair cancel min(#i->j, #j->i) opposite arrows,
// pairing them off in ascending id order.
inline quiver cancel_two_cycles(const quiver &q)
{
    const auto n = q.num_vertices();
    std::vector<bool> drop(q.num_arrows(), false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto fwd = q.arrows_between(i, j);
            const auto bwd = q.arrows_between(j, i);
            const auto m = std::min(fwd.size(), bwd.size());
            for (std::size_t t = 0; t < m; ++t) {
                drop[fwd[t]] = true;
                drop[bwd[t]] = true;
            }
        }
    }
    std::vector<arrow> kept;
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        if (!drop[a]) {
            kept.push_back(q.arrow_at(a));
        }
    }
    return quiver::from_resolved(q.vertices(), std::move(kept));
}

inline quiver mutate_quiver(const quiver &q, std::size_t k)
{
    return cancel_two_cycles(premutate_quiver(q, k));
}

inline quiver mutate_quiver(const quiver &q, const std::string &k)
{
    return mutate_quiver(q, q.vertex_index(k));
}

inline exchange_matrix to_matrix(const quiver &q)
{
    if (!is_two_acyclic(q)) {
        throw_precondition("TwoCycleError", "exchange matrix is undefined for a quiver with oriented 2-cycles");
    }
    const auto n = q.num_vertices();
    exchange_matrix b(n);
    for (const auto &a : q.arrows()) {
        b(a.head, a.tail) += 1;
        b(a.tail, a.head) -= 1;
    }
    return b;
}

// The 2-acyclic quiver realizing b; arrow ids are "v<i>_<j>_<n>".
inline quiver from_matrix(const exchange_matrix &b, std::vector<std::string> vertices)
{
    if (vertices.size() != b.size()) {
        throw_input("ShapeMismatch", "vertex count does not match matrix size");
    }
    if (!b.is_skew_symmetric()) {
        throw_input("NotSkewSymmetric", "exchange matrix must be skew-symmetric");
    }
    std::vector<arrow> arrows;
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            // b(i, j) > 0 counts arrows j -> i.
            for (std::int64_t t = 0; t < b(i, j); ++t) {
                arrows.push_back({"v" + std::to_string(j) + "_" + std::to_string(i) + "_" + std::to_string(t), j, i});
            }
        }
    }
    return quiver::from_resolved(std::move(vertices), std::move(arrows));
}

// Cluster-algebra matrix mutation at index k.
inline exchange_matrix matrix_mutate(const exchange_matrix &b, std::size_t k)
{
    const auto n = b.size();
    if (k >= n) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    exchange_matrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == k || j == k) {
                r(i, j) = -b(i, j);
            } else {
                const auto bik = b(i, k);
                const auto sgn = (bik > 0) - (bik < 0);
                r(i, j) = b(i, j) + sgn * std::max<std::int64_t>(bik * b(k, j), 0);
            }
        }
    }
    return r;
}

} // namespace qpmut

#endif
