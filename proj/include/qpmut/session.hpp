#ifndef QPMUT_SESSION_HPP
#define QPMUT_SESSION_HPP

#include <chrono>
#include <ctime>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <qpmut/error.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/json_io.hpp>
#include <qpmut/mutation.hpp>
#include <qpmut/qp.hpp>

namespace qpmut
{

struct history_node {
    std::string id;
    std::optional<std::size_t> parent;
    std::optional<std::size_t> vertex; // edge label from the parent
    qp state;
    truncated_quotient dims;
    // Set on nodes reached by mutating twice at the same vertex: whether
    // the invariants match those of the grandparent.
    std::optional<bool> involution;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t)
{
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// A mutation history tree rooted at the initial QP. All methods lock, so
// mutations of one session serialize.
class session
{
public:
    session(std::string id, qp initial) : m_id(std::move(id)), m_created(utc_timestamp(std::chrono::system_clock::now()))
    {
        add_node(std::nullopt, std::nullopt, std::move(initial));
    }

    const std::string &id() const noexcept
    {
        return m_id;
    }

    // Mutates the current node at `vertex`. An existing child along the
    // same edge is reused, so replayed sequences give identical trees.
    nlohmann::json mutate(const std::string &vertex)
    {
        std::lock_guard lock(m_mutex);
        const auto &cur = m_nodes[m_current];
        const auto k = cur.state.graph->vertex_index(vertex);
        for (std::size_t c = 0; c < m_nodes.size(); ++c) {
            if (m_nodes[c].parent == m_current && m_nodes[c].vertex == k) {
                m_current = c;
                return state_locked();
            }
        }
        qp next = mutate_qp(cur.state, k);
        add_node(m_current, k, std::move(next));
        m_current = m_nodes.size() - 1;
        return state_locked();
    }

    nlohmann::json checkout(const std::string &node)
    {
        std::lock_guard lock(m_mutex);
        for (std::size_t c = 0; c < m_nodes.size(); ++c) {
            if (m_nodes[c].id == node) {
                m_current = c;
                return state_locked();
            }
        }
        throw_input("UnknownNode", "no history node '" + node + "' in session " + m_id);
    }

    nlohmann::json state() const
    {
        std::lock_guard lock(m_mutex);
        return state_locked();
    }

    // The history tree alone; independent of timestamps.
    nlohmann::json tree() const
    {
        std::lock_guard lock(m_mutex);
        return tree_locked();
    }

private:
    void add_node(std::optional<std::size_t> parent, std::optional<std::size_t> vertex, qp x)
    {
        history_node n;
        n.id = "n" + std::to_string(m_nodes.size());
        n.parent = parent;
        n.vertex = vertex;
        n.dims = jacobian_dims(x);
        if (parent && vertex) {
            const auto &p = m_nodes[*parent];
            if (p.parent && p.vertex == vertex) {
                involution_report rep;
                rep.twice = x;
                const auto &orig = m_nodes[*p.parent].state;
                detail::compare_involution(rep, orig, std::min(orig.order(), x.order()));
                n.involution = rep.passed();
            }
        }
        n.state = std::move(x);
        m_nodes.push_back(std::move(n));
    }

    nlohmann::json tree_locked() const
    {
        auto nodes = nlohmann::json::array();
        for (const auto &n : m_nodes) {
            const auto &verts = n.state.graph->vertices();
            nodes.push_back({{"id", n.id},
                             {"parent", n.parent ? nlohmann::json(m_nodes[*n.parent].id) : nlohmann::json(nullptr)},
                             {"vertex", n.vertex ? nlohmann::json(verts[*n.vertex]) : nlohmann::json(nullptr)},
                             {"arrows", n.state.graph->num_arrows()},
                             {"terms", n.state.pot.terms().size()},
                             {"involution", n.involution ? nlohmann::json(*n.involution) : nlohmann::json(nullptr)}});
        }
        return nodes;
    }

    nlohmann::json state_locked() const
    {
        const auto &cur = m_nodes[m_current];
        const auto &q = *cur.state.graph;
        auto admissible = nlohmann::json::object();
        for (std::size_t v = 0; v < q.num_vertices(); ++v) {
            admissible[q.vertices()[v]] = !has_two_cycle_through(q, v);
        }
        return {{"id", m_id},
                {"created_at", m_created},
                {"current", cur.id},
                {"qp", io::to_json(cur.state)},
                {"jacobian", io::to_json(cur.dims)},
                {"admissible", admissible},
                {"nodes", tree_locked()}};
    }

    std::string m_id;
    std::string m_created;
    mutable std::mutex m_mutex;
    std::vector<history_node> m_nodes;
    std::size_t m_current = 0;
};

// In-memory sessions with ids s1, s2, ... in creation order.
class session_store
{
public:
    std::string create(qp initial)
    {
        std::lock_guard lock(m_mutex);
        auto id = "s" + std::to_string(++m_counter);
        m_sessions.emplace(id, std::make_shared<session>(id, std::move(initial)));
        return id;
    }

    std::shared_ptr<session> find(const std::string &id) const
    {
        std::lock_guard lock(m_mutex);
        const auto it = m_sessions.find(id);
        return it == m_sessions.end() ? nullptr : it->second;
    }

    nlohmann::json snapshot() const
    {
        std::lock_guard lock(m_mutex);
        auto out = nlohmann::json::object();
        for (const auto &[id, s] : m_sessions) {
            out[id] = s->state();
        }
        return out;
    }

private:
    mutable std::mutex m_mutex;
    std::map<std::string, std::shared_ptr<session>> m_sessions;
    std::size_t m_counter = 0;
};

} // namespace qpmut

#endif
