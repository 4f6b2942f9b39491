#ifndef QPMUT_JSON_IO_HPP
#define QPMUT_JSON_IO_HPP

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <qpmut/decorated.hpp>
#include <qpmut/error.hpp>
#include <qpmut/exactlin.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/mutation.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>
#include <qpmut/quiver.hpp>
#include <qpmut/reduction.hpp>

namespace qpmut::io
{

using json = nlohmann::json;

inline int default_order()
{
    if (const char *env = std::getenv("QPMUT_DEFAULT_ORDER")) {
        try {
            const int n = std::stoi(env);
            if (n >= 0) {
                return n;
            }
        } catch (const std::exception &) {
        }
        throw_input("ParseError", std::string("QPMUT_DEFAULT_ORDER is not a nonnegative integer: ") + env);
    }
    return 10;
}

template <typename T>
T field(const json &j, const char *key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw_input("ParseError", std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw_input("ParseError", std::string("field '") + key + "': " + e.what());
    }
}

inline json read_file(const std::string &file)
{
    std::ifstream in(file);
    if (!in) {
        throw_input("FileError", "cannot open '" + file + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw_input("ParseError", file + ": " + e.what());
    }
}

inline void write_file(const std::string &file, const json &j)
{
    std::ofstream out(file);
    if (!out) {
        throw_input("FileError", "cannot write '" + file + "'");
    }
    out << j.dump(2) << '\n';
}

// Rationals travel as strings; plain JSON integers are accepted on input.
inline json rational_to_json(const rational &r)
{
    return to_string(r);
}

inline rational rational_from_json(const json &j)
{
    if (j.is_string()) {
        return parse_rational(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return rational(j.get<long>());
    }
    throw_input("ParseError", "rational must be a string \"p/q\" or an integer, got " + j.dump());
}

// ---- quiver ----

inline json to_json(const quiver &q)
{
    json arrows = json::array();
    for (const auto &a : q.arrows()) {
        arrows.push_back({{"id", a.id}, {"tail", q.vertices()[a.tail]}, {"head", q.vertices()[a.head]}});
    }
    return {{"vertices", q.vertices()}, {"arrows", arrows}};
}

inline quiver quiver_from_json(const json &j)
{
    const auto vertices = field<std::vector<std::string>>(j, "vertices");
    std::vector<arrow_spec> arrows;
    if (j.contains("arrows")) {
        for (const auto &a : j.at("arrows")) {
            arrows.push_back({field<std::string>(a, "id"), field<std::string>(a, "tail"), field<std::string>(a, "head")});
        }
    }
    return quiver(vertices, arrows);
}

// ---- path algebra ----

inline json to_json(const element &x)
{
    const auto &q = x.graph();
    json terms = json::array();
    for (const auto &[p, c] : x.terms()) {
        json t;
        if (p.arrows.empty()) {
            t["vertex"] = q.vertices()[p.head];
        } else {
            json ids = json::array();
            for (auto a : p.arrows) {
                ids.push_back(q.arrow_at(a).id);
            }
            t["path"] = ids;
        }
        t["coeff"] = rational_to_json(c);
        terms.push_back(std::move(t));
    }
    return {{"order", x.order()}, {"terms", terms}};
}

inline json to_json(const potential &s)
{
    auto j = to_json(s.as_element());
    j["cyclic"] = true;
    return j;
}

inline element element_from_json(const json &j, const quiver_ptr &q, int fallback_order)
{
    const int order = j.contains("order") ? field<int>(j, "order") : fallback_order;
    element e(q, order);
    if (!j.contains("terms")) {
        return e;
    }
    for (const auto &t : j.at("terms")) {
        const auto c = rational_from_json(t.contains("coeff") ? t.at("coeff") : json(1));
        if (t.contains("vertex")) {
            e.add(idempotent_path(q->vertex_index(field<std::string>(t, "vertex"))), c);
        } else {
            e.add(make_path(*q, field<std::vector<std::string>>(t, "path")), c);
        }
    }
    return e;
}

inline potential potential_from_json(const json &j, const quiver_ptr &q, int fallback_order)
{
    return canonicalize_potential(element_from_json(j, q, fallback_order));
}

inline json to_json(const substitution &phi)
{
    json images = json::object();
    for (std::size_t a = 0; a < phi.graph().num_arrows(); ++a) {
        images[phi.graph().arrow_at(a).id] = to_json(phi.image(a));
    }
    return {{"order", phi.order()}, {"images", images}};
}

inline substitution substitution_from_json(const json &j, const quiver_ptr &q)
{
    const int order = j.contains("order") ? field<int>(j, "order") : default_order();
    std::vector<element> imgs;
    const auto &images = j.contains("images") ? j.at("images") : json::object();
    for (const auto &a : q->arrows()) {
        if (images.contains(a.id)) {
            imgs.push_back(element_from_json(images.at(a.id), q, order));
        } else {
            imgs.push_back(element::arrow(q, q->arrow_index(a.id), order));
        }
    }
    return substitution(q, std::move(imgs));
}

// ---- QP ----

inline json to_json(const qp &x)
{
    return {{"quiver", to_json(*x.graph)}, {"potential", to_json(x.pot)}};
}

// {"quiver": ..., "potential": ...}; a bare quiver object is read as a QP
// with zero potential. `order_override` (if >= 0) re-declares the order.
inline qp qp_from_json(const json &j, int order_override = -1)
{
    const bool bare = j.contains("vertices");
    auto q = share(quiver_from_json(bare ? j : j.at("quiver")));
    const int fallback = order_override >= 0 ? order_override : default_order();
    potential s = (!bare && j.contains("potential")) ? potential_from_json(j.at("potential"), q, fallback)
                                                     : potential::zero(q, fallback);
    if (order_override >= 0) {
        s = s.with_order(order_override);
    }
    return qp(q, std::move(s));
}

inline json to_json(const truncated_quotient &t)
{
    return {{"order", t.order}, {"dims", t.dims}, {"trusted_below_degree", t.trusted_below_degree}};
}

inline json to_json(const split_result &sr)
{
    json pairs = json::array();
    for (const auto &p : sr.trivial) {
        pairs.push_back({{"a", p.a}, {"b", p.b}});
    }
    return {{"trivial_pairs", pairs},
            {"reduced", to_json(sr.reduced)},
            {"witness", to_json(sr.witness)},
            {"basis_change", to_json(sr.basis_change)},
            {"passes", sr.passes}};
}

inline json to_json(const std::map<std::string, arrow_origin> &prov)
{
    json j = json::object();
    for (const auto &[id, o] : prov) {
        j[id] = {{"kind", to_string(o.how)}, {"from", o.from}};
    }
    return j;
}

inline json to_json(const involution_report &r)
{
    auto val = [](const std::optional<std::size_t> &v) { return v ? json(*v) : json(nullptr); };
    return {{"vertex", r.once.graph->vertices()[r.vertex]},
            {"passed", r.passed()},
            {"arrows_match", r.arrows_match},
            {"dims_match", r.dims_match},
            {"profile_match", r.profile_match},
            {"compared_order", r.compared_order},
            {"dims_original", to_json(r.dims_original)},
            {"dims_twice", to_json(r.dims_twice)},
            {"valuation_original", val(r.valuation_original)},
            {"valuation_twice", val(r.valuation_twice)},
            {"once", to_json(r.once)},
            {"twice", to_json(r.twice)}};
}

// ---- representations ----

inline json matrix_to_json(const rat_matrix &m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(rational_to_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline rat_matrix matrix_from_json(const json &j, std::size_t rows, std::size_t cols)
{
    if (!j.is_array() || j.size() != rows) {
        throw_input("ShapeMismatch", "expected " + std::to_string(rows) + " matrix rows, got " + j.dump());
    }
    rat_matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw_input("ShapeMismatch", "expected " + std::to_string(cols) + " entries in row " + std::to_string(i));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(i, c) = rational_from_json(j[i][c]);
        }
    }
    return m;
}

inline json to_json(const decorated_rep &dm)
{
    const auto &q = *dm.rep.graph;
    json dims = json::object();
    json dec = json::object();
    for (std::size_t v = 0; v < q.num_vertices(); ++v) {
        dims[q.vertices()[v]] = dm.rep.dims[v];
        dec[q.vertices()[v]] = dm.decoration[v];
    }
    json maps = json::object();
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        maps[q.arrow_at(a).id] = matrix_to_json(dm.rep.maps[a]);
    }
    return {{"dims", dims}, {"maps", maps}, {"decoration", dec}};
}

// Missing dims/decoration entries default to 0; missing maps to zero maps.
inline decorated_rep decorated_from_json(const json &j, const quiver_ptr &q)
{
    std::vector<std::size_t> dims(q->num_vertices(), 0);
    std::vector<std::size_t> dec(q->num_vertices(), 0);
    if (j.contains("dims")) {
        for (const auto &[v, d] : j.at("dims").items()) {
            dims[q->vertex_index(v)] = d.get<std::size_t>();
        }
    }
    if (j.contains("decoration")) {
        for (const auto &[v, d] : j.at("decoration").items()) {
            dec[q->vertex_index(v)] = d.get<std::size_t>();
        }
    }
    std::vector<rat_matrix> maps;
    for (const auto &a : q->arrows()) {
        const auto r = dims[a.head];
        const auto c = dims[a.tail];
        if (j.contains("maps") && j.at("maps").contains(a.id)) {
            maps.push_back(matrix_from_json(j.at("maps").at(a.id), r, c));
        } else {
            maps.emplace_back(r, c);
        }
    }
    if (j.contains("maps")) {
        for (const auto &[id, m] : j.at("maps").items()) {
            q->arrow_index(id);
        }
    }
    return decorated_rep(representation(q, std::move(dims), std::move(maps)), std::move(dec));
}

inline json error_json(const error &e)
{
    return {{"error", e.code()}, {"detail", e.what()}};
}

} // namespace qpmut::io

#endif
