#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include <qpmut/server.hpp>
#include <qpmut/session.hpp>

#include "support.hpp"

using nlohmann::json;
using namespace qpmut;

namespace
{

const char *triangle_body = R"({"qp": {"quiver": {"vertices": ["1","2","3"], "arrows": [
  {"id":"a","tail":"1","head":"2"}, {"id":"b","tail":"2","head":"3"}, {"id":"c","tail":"3","head":"1"}]},
  "potential": {"terms": [{"path": ["c","b","a"], "coeff": "1"}]}}, "order": 8})";

class Server : public ::testing::Test
{
protected:
    void SetUp() override
    {
        install_routes(srv, store);
        port = srv.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port, 0);
        worker = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
    }
    void TearDown() override
    {
        srv.stop();
        worker.join();
    }

    std::pair<int, json> post(const std::string &p, const std::string &body)
    {
        auto r = client->Post(p, body, "application/json");
        return {r->status, json::parse(r->body)};
    }
    std::pair<int, json> get(const std::string &p)
    {
        auto r = client->Get(p);
        return {r->status, json::parse(r->body)};
    }
    std::string create()
    {
        const auto [status, j] = post("/sessions", triangle_body);
        EXPECT_EQ(status, 201);
        return j["id"];
    }
    json mutate(const std::string &id, const std::string &v)
    {
        const auto [status, j] = post("/sessions/" + id + "/mutate", json{{"vertex", v}}.dump());
        EXPECT_EQ(status, 200) << j.dump();
        return j;
    }

    session_store store;
    httplib::Server srv;
    int port = 0;
    std::thread worker;
    std::unique_ptr<httplib::Client> client;
};

} // namespace

TEST_F(Server, CreateAndGet)
{
    EXPECT_EQ(create(), "s1");
    EXPECT_EQ(create(), "s2");
    const auto [status, j] = get("/sessions/s1");
    ASSERT_EQ(status, 200);
    EXPECT_EQ(j["id"], "s1");
    EXPECT_EQ(j["current"], "n0");
    EXPECT_EQ(j["jacobian"]["dims"], json({3, 3, 0, 0, 0, 0, 0}));
    EXPECT_EQ(j["nodes"].size(), 1u);
    EXPECT_TRUE(j["admissible"]["2"].get<bool>());
    EXPECT_TRUE(j.contains("created_at"));
}

TEST_F(Server, MutateTriangle)
{
    const auto id = create();
    const auto j = mutate(id, "2");
    EXPECT_EQ(j["current"], "n1");
    EXPECT_EQ(j["qp"]["quiver"]["arrows"].size(), 2u);
    EXPECT_TRUE(j["qp"]["potential"]["terms"].empty());
    EXPECT_EQ(j["nodes"][1]["parent"], "n0");
    EXPECT_EQ(j["nodes"][1]["vertex"], "2");
    // Second mutation at 2 comes back and reports the invariant check.
    const auto k = mutate(id, "2");
    EXPECT_EQ(k["nodes"][2]["involution"], true);
    EXPECT_EQ(k["qp"]["quiver"]["arrows"].size(), 3u);
}

TEST_F(Server, PreconditionIs409)
{
    const auto [status, j] = post("/sessions", R"({"quiver": {"vertices": ["1","2"], "arrows": [
        {"id":"a","tail":"1","head":"2"}, {"id":"b","tail":"2","head":"1"}]}})");
    ASSERT_EQ(status, 201);
    const auto id = j["id"].get<std::string>();
    EXPECT_FALSE(get("/sessions/" + id).second["admissible"]["1"].get<bool>());
    const auto [s2, e] = post("/sessions/" + id + "/mutate", R"({"vertex": "1"})");
    EXPECT_EQ(s2, 409);
    EXPECT_EQ(e["error"], "TwoCycleAtVertex");
    EXPECT_TRUE(e.contains("detail"));
}

TEST_F(Server, NotFoundAndBadInput)
{
    EXPECT_EQ(get("/sessions/s99").first, 404);
    EXPECT_EQ(post("/sessions/s99/mutate", R"({"vertex": "1"})").first, 404);
    EXPECT_EQ(post("/sessions", "{nope").first, 400);
    EXPECT_EQ(post("/sessions", R"({"qp": {"quiver": {"vertices": ["1"], "arrows": [{"id":"a","tail":"1","head":"1"}]}}})")
                  .first,
              409);
    const auto id = create();
    EXPECT_EQ(post("/sessions/" + id + "/mutate", R"({"vertex": "9"})").first, 400);
    EXPECT_EQ(post("/sessions/" + id + "/mutate", R"({})").first, 400);
    EXPECT_EQ(post("/sessions/" + id + "/checkout", R"({"node": "n7"})").first, 404);
}

TEST_F(Server, CheckoutBranchesTree)
{
    const auto id = create();
    mutate(id, "2");
    mutate(id, "1");
    const auto [status, j] = post("/sessions/" + id + "/checkout", R"({"node": "n1"})");
    ASSERT_EQ(status, 200);
    EXPECT_EQ(j["current"], "n1");
    const auto k = mutate(id, "3");
    EXPECT_EQ(k["current"], "n3");
    EXPECT_EQ(k["nodes"][3]["parent"], "n1");
    // Replaying an existing edge reuses its node.
    post("/sessions/" + id + "/checkout", R"({"node": "n1"})");
    EXPECT_EQ(mutate(id, "1")["current"], "n2");
}

TEST_F(Server, ReplayGivesIdenticalTrees)
{
    const auto a = create();
    const auto b = create();
    for (const auto *v : {"2", "1", "3", "1", "2"}) {
        mutate(a, v);
        mutate(b, v);
    }
    EXPECT_EQ(get("/sessions/" + a).second["nodes"], get("/sessions/" + b).second["nodes"]);
    EXPECT_EQ(store.find(a)->tree(), store.find(b)->tree());
}

TEST_F(Server, ConcurrentSessions)
{
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) {
        ids.push_back(create());
    }
    std::vector<std::thread> ts;
    for (const auto &id : ids) {
        ts.emplace_back([this, id] {
            httplib::Client c("127.0.0.1", port);
            for (const auto *v : {"2", "1", "2"}) {
                auto r = c.Post("/sessions/" + id + "/mutate", json{{"vertex", v}}.dump(), "application/json");
                EXPECT_EQ(r->status, 200);
            }
        });
    }
    for (auto &t : ts) {
        t.join();
    }
    for (const auto &id : ids) {
        EXPECT_EQ(store.find(id)->tree(), store.find(ids[0])->tree());
    }
}

TEST(SessionStore, SnapshotHoldsEverySession)
{
    session_store store;
    store.create(support::triangle_qp(8));
    store.create(support::triangle_qp(8));
    store.find("s1")->mutate("2");
    const auto snap = store.snapshot();
    EXPECT_EQ(snap.size(), 2u);
    EXPECT_EQ(snap["s1"]["nodes"].size(), 2u);
}
