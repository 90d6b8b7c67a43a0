#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "stosub/bounds.hpp"
#include "stosub/errors.hpp"
#include "stosub/io.hpp"
#include "stosub/matroid.hpp"
#include "stosub/policies.hpp"
#include "stosub/rng.hpp"
#include "stosub/types.hpp"

using namespace stosub;

namespace {

WeightedOutcome cover(std::vector<int> items, double prob) {
    return {SubsetOutcome{std::move(items)}, prob};
}

Instance sample_instance() {
    std::vector<StochasticElement> elems;
    elems.push_back({0, DiscreteDistribution({cover({0, 1}, 0.25), cover({}, 0.75)})});
    elems.push_back({1, DiscreteDistribution({cover({2}, 1.0)})});
    return Instance(std::move(elems), CoverageObjective{3, {1.0, 0.5, 2.0}});
}

std::string temp_path(const char* stem) {
    return std::string("/tmp/stosub_io_test_") + stem + ".json";
}

}  // namespace

TEST_CASE("instance json round trip preserves bytes") {
    Instance inst = sample_instance();
    Matroid m = Matroid::partition({0, 0}, {1});
    nlohmann::ordered_json doc = instance_to_json(inst, &m);
    LoadedInstance loaded = instance_from_json(doc);
    REQUIRE(loaded.matroid.has_value());
    CHECK(loaded.matroid->kind() == MatroidKind::Partition);
    CHECK(instance_to_json(loaded.instance, &*loaded.matroid).dump(2) == doc.dump(2));
}

TEST_CASE("all objective kinds round trip") {
    SUBCASE("concave sum") {
        std::vector<StochasticElement> elems;
        elems.push_back({0, DiscreteDistribution({{ScalarOutcome{1.5}, 0.5},
                                                  {ScalarOutcome{0.25}, 0.5}})});
        Instance inst(std::move(elems), ConcaveOfSumObjective{{{1.0, 1.0}, {3.0, 2.0}}});
        nlohmann::ordered_json doc = instance_to_json(inst);
        LoadedInstance loaded = instance_from_json(doc);
        CHECK(instance_to_json(loaded.instance).dump() == doc.dump());
        CHECK(eval_f(loaded.instance, PartialRealization(std::map<ElementId, int>{{0, 0}})) ==
              doctest::Approx(1.25));
    }
    SUBCASE("table") {
        std::vector<StochasticElement> elems;
        elems.push_back({0, DiscreteDistribution({{IndexOutcome{0}, 0.5},
                                                  {IndexOutcome{1}, 0.5}})});
        Instance inst(std::move(elems), TableObjective{{0.0, 1.0, 1.5}});
        nlohmann::ordered_json doc = instance_to_json(inst);
        LoadedInstance loaded = instance_from_json(doc);
        CHECK(instance_to_json(loaded.instance).dump() == doc.dump());
    }
}

TEST_CASE("instance files save and load losslessly") {
    Instance inst = sample_instance();
    Matroid m = Matroid::uniform(2, 1);
    const std::string path = temp_path("roundtrip");
    save_instance_file(path, inst, &m);
    LoadedInstance loaded = load_instance_file(path);
    CHECK(loaded.instance.num_elements() == 2);
    REQUIRE(loaded.matroid.has_value());
    CHECK(loaded.matroid->rank() == 1);
    const std::string bytes_once = read_text_file(path);
    save_instance_file(path, loaded.instance, &*loaded.matroid);
    CHECK(read_text_file(path) == bytes_once);
    std::remove(path.c_str());
}

TEST_CASE("loader rejects malformed documents") {
    nlohmann::json good = instance_to_json(sample_instance());

    nlohmann::json bad = good;
    bad["elements"][0]["support"][0]["prob"] = -0.25;
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);

    bad = good;
    bad["elements"][0]["support"][0]["prob"] = 0.3;  // probabilities no longer sum to 1
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);

    bad = good;
    bad["elements"][1]["id"] = 0;  // ids must strictly increase
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);

    bad = good;
    bad["objective"]["kind"] = "mystery";
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);

    bad = good;
    bad.erase("elements");
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);

    bad = good;
    bad["elements"][0]["support"][0]["payload"] = "oops";  // wrong payload type
    CHECK_THROWS_AS((void)instance_from_json(bad), InvalidInputError);
}

TEST_CASE("matroid blocks round trip and validate") {
    Matroid u = Matroid::uniform(4, 2);
    CHECK(matroid_from_json(matroid_to_json(u), 4).rank() == 2);

    Matroid p = Matroid::partition({0, 1, 1}, {1, 2});
    Matroid p2 = matroid_from_json(matroid_to_json(p), 3);
    CHECK(p2.kind() == MatroidKind::Partition);
    CHECK(p2.rank() == 3);

    Matroid e = Matroid::explicit_family(2, {{}, {0}, {1}});
    Matroid e2 = matroid_from_json(matroid_to_json(e), 2);
    CHECK(e2.kind() == MatroidKind::Explicit);
    CHECK_FALSE(e2.is_independent({0, 1}));

    CHECK_THROWS_AS((void)matroid_from_json(matroid_to_json(p), 5), InvalidInputError);
    nlohmann::json junk = {{"kind", "galois"}};
    CHECK_THROWS_AS((void)matroid_from_json(junk, 3), InvalidInputError);
}

TEST_CASE("trace serialization emits one parseable line per step") {
    Instance inst = sample_instance();
    Matroid m = Matroid::uniform(2, 2);
    RandomStream rng(4);
    PolicyTrace trace = run_myopic_adaptive(inst, m, rng);
    const std::string lines = trace_to_json_lines(trace);
    std::istringstream in(lines);
    std::string line;
    int count = 0;
    nlohmann::json last;
    while (std::getline(in, line)) {
        last = nlohmann::json::parse(line);  // throws on malformed output
        ++count;
    }
    CHECK(count == static_cast<int>(trace.steps.size()) + 1);
    CHECK(last.contains("final_value"));
    CHECK(last["chosen"].size() == trace.chosen.size());
}

TEST_CASE("certificate serialization carries the full chain") {
    Instance inst = sample_instance();
    Matroid m = Matroid::uniform(2, 1);
    GapChainCertificate cert = verify_gap_chain(inst, m);
    nlohmann::ordered_json doc = certificate_to_json(cert);
    for (const char* key : {"A", "U", "M", "N", "y_star", "rounded_set",
                            "rounded_value", "links", "ok"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["links"].size() == 5);
    CHECK(doc["ok"].get<bool>() == cert.ok);
}

TEST_CASE("text file helpers raise IoError") {
    CHECK_THROWS_AS((void)read_text_file("/tmp/definitely_missing_stosub_file"), IoError);
    CHECK_THROWS_AS(write_text_file("/tmp/no_such_dir_stosub/x.json", "hi"), IoError);
    const std::string path = temp_path("text");
    write_text_file(path, "payload\n");
    CHECK(read_text_file(path) == "payload\n");
    std::remove(path.c_str());
}
