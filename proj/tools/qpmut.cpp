#include <csignal>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <qpmut/decorated.hpp>
#include <qpmut/error.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/json_io.hpp>
#include <qpmut/mutation.hpp>
#include <qpmut/quiver.hpp>
#include <qpmut/reduction.hpp>
#include <qpmut/server.hpp>
#include <qpmut/session.hpp>

using namespace qpmut;
using nlohmann::json;

namespace
{

int exit_code(error_kind k)
{
    switch (k) {
        case error_kind::input:
            return 2;
        case error_kind::precondition:
            return 3;
        case error_kind::invariant:
            return 4;
    }
    return 4;
}

void emit(const std::string &out, const json &j)
{
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        io::write_file(out, j);
    }
}

httplib::Server *g_server = nullptr;

void on_signal(int)
{
    if (g_server) {
        g_server->stop();
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Mutations of quivers with potentials"};
    app.require_subcommand(1);

    std::string in, out, vertex, rep_file, quiver_file, snapshot, host = "127.0.0.1";
    int order = -1;
    int port = 8080;
    int trials = 8;
    int lift = 0;
    std::uint64_t seed = 0;
    std::size_t max_degree = 4;

    auto *mutate = app.add_subcommand("mutate", "combinatorial quiver mutation");
    mutate->add_option("--in", in, "quiver or QP JSON")->required();
    mutate->add_option("--vertex", vertex)->required();
    mutate->add_option("--out", out, "output file (default stdout)");

    auto *mutate_qp_cmd = app.add_subcommand("mutate-qp", "QP mutation with provenance report");
    mutate_qp_cmd->add_option("--in", in)->required();
    mutate_qp_cmd->add_option("--vertex", vertex)->required();
    mutate_qp_cmd->add_option("--order", order, "truncation order N");
    mutate_qp_cmd->add_option("--out", out);

    auto *reduce = app.add_subcommand("reduce", "split into trivial and reduced parts");
    reduce->add_option("--in", in)->required();
    reduce->add_option("--order", order);
    reduce->add_option("--out", out);

    auto *jac = app.add_subcommand("jac-dims", "graded dimensions of the truncated Jacobian algebra");
    jac->add_option("--in", in)->required();
    jac->add_option("--order", order);

    auto *rep = app.add_subcommand("rep-mutate", "decorated representation mutation at a sink or source");
    rep->add_option("--rep", rep_file)->required();
    rep->add_option("--qp", in)->required();
    rep->add_option("--vertex", vertex)->required();
    rep->add_option("--out", out);

    auto *inv = app.add_subcommand("check-involution", "compare (A,S) with mu_k^2(A,S)");
    inv->add_option("--in", in)->required();
    inv->add_option("--vertex", vertex)->required();
    inv->add_option("--order", order);
    inv->add_option("--lift", lift, "raise the working order up to this bound so the comparison is at --order");

    auto *rnd = app.add_subcommand("random-potential", "seeded random potential on a quiver");
    rnd->add_option("--quiver", quiver_file)->required();
    rnd->add_option("--seed", seed);
    rnd->add_option("--max-degree", max_degree)->check(CLI::Range(2, 16));
    rnd->add_option("--order", order);
    rnd->add_option("--out", out);

    auto *iso = app.add_subcommand("rep-iso", "randomized isomorphism test of two representations");
    iso->add_option("--qp", in)->required();
    iso->add_option("--rep", rep_file)->required();
    std::string rep2_file;
    iso->add_option("--rep2", rep2_file)->required();
    iso->add_option("--trials", trials)->check(CLI::PositiveNumber);
    iso->add_option("--seed", seed);

    auto *serve = app.add_subcommand("serve", "HTTP/JSON session server");
    serve->add_option("--port", port);
    serve->add_option("--host", host);
    serve->add_option("--in", in, "initial QP used by an empty POST /sessions");
    serve->add_option("--snapshot", snapshot, "write all sessions here on shutdown");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mutate) {
            const auto j = io::read_file(in);
            const auto q = io::quiver_from_json(j.contains("quiver") ? j.at("quiver") : j);
            emit(out, io::to_json(mutate_quiver(q, vertex)));
        } else if (*mutate_qp_cmd) {
            const auto x = io::qp_from_json(io::read_file(in), order);
            const auto r = mutate_qp_detailed(x, x.graph->vertex_index(vertex));
            auto j = io::to_json(r.result);
            j["provenance"] = io::to_json(r.provenance);
            j["premutation"] = io::to_json(r.pre.tilde);
            j["trivial_pairs"] = io::to_json(r.split)["trivial_pairs"];
            emit(out, j);
        } else if (*reduce) {
            const auto x = io::qp_from_json(io::read_file(in), order);
            const auto sr = split(x);
            if (!verify_split(x, sr)) {
                throw_invariant("SplitVerification", "witness does not carry S to the split form");
            }
            emit(out, io::to_json(sr));
        } else if (*jac) {
            const auto x = io::qp_from_json(io::read_file(in), order);
            std::cout << io::to_json(jacobian_dims(x)).dump() << '\n';
        } else if (*rep) {
            const auto x = io::qp_from_json(io::read_file(in));
            const auto dm = io::decorated_from_json(io::read_file(rep_file), x.graph);
            if (!check_relations(dm.rep, x, default_nilpotency_bound(dm.rep))) {
                throw_precondition("NotAModule", "representation does not satisfy the Jacobian relations");
            }
            const auto r = mutate_decorated(dm, x.graph->vertex_index(vertex));
            auto j = io::to_json(r);
            j["quiver"] = io::to_json(*r.rep.graph);
            emit(out, j);
        } else if (*inv) {
            const auto x = io::qp_from_json(io::read_file(in), order);
            const auto k = x.graph->vertex_index(vertex);
            const auto r = lift > 0 ? check_involution_lifted(x, k, x.order(), lift) : check_involution(x, k);
            std::cout << io::to_json(r).dump(2) << '\n';
            if (!r.passed()) {
                return 4;
            }
        } else if (*rnd) {
            auto j = io::read_file(quiver_file);
            auto q = share(io::quiver_from_json(j.contains("quiver") ? j.at("quiver") : j));
            const int n = order >= 0 ? order : io::default_order();
            emit(out, io::to_json(qp(q, random_potential(q, max_degree, seed, n))));
        } else if (*iso) {
            const auto x = io::qp_from_json(io::read_file(in));
            const auto m1 = io::decorated_from_json(io::read_file(rep_file), x.graph);
            const auto m2 = io::decorated_from_json(io::read_file(rep2_file), x.graph);
            const bool same = m1.decoration == m2.decoration
                              && is_isomorphic(m1.rep, m2.rep, static_cast<std::size_t>(trials), seed ? seed : 0x5eed);
            std::cout << json{{"isomorphic", same}}.dump() << '\n';
        } else if (*serve) {
            std::optional<qp> initial;
            if (!in.empty()) {
                initial = io::qp_from_json(io::read_file(in));
            }
            session_store store;
            httplib::Server srv;
            install_routes(srv, store, initial);
            g_server = &srv;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ':' << port << '\n';
            if (!srv.listen(host, port)) {
                throw_input("BindError", "cannot listen on " + host + ":" + std::to_string(port));
            }
            if (!snapshot.empty()) {
                io::write_file(snapshot, store.snapshot());
            }
        }
    } catch (const error &e) {
        std::cerr << io::error_json(e).dump() << '\n';
        return exit_code(e.kind());
    } catch (const json::exception &e) {
        std::cerr << json{{"error", "ParseError"}, {"detail", e.what()}}.dump() << '\n';
        return 2;
    }
    return 0;
}
