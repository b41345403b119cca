#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "nullhom/conductance.hpp"
#include "nullhom/config.hpp"

using namespace nullhom;

TEST_CASE("toml-lite parses flat tables") {
    std::stringstream in(R"(# run parameters
dim = 2            # inline comment
L = 8
a = 0.5
name = "field # one"
flag = true
sides = [4, 8, 12]
levels = [0.9, 0.99]

[sampler]
type = "srw"
dim = 1
)");
    auto j = parse_toml_lite(in);
    REQUIRE(j.at("dim").get<int>() == 2);
    REQUIRE(j.at("a").get<double>() == 0.5);
    REQUIRE(j.at("name").get<std::string>() == "field # one");
    REQUIRE(j.at("flag").get<bool>() == true);
    REQUIRE(j.at("sides").get<std::vector<int>>() == std::vector<int>{4, 8, 12});
    REQUIRE(j.at("levels").get<std::vector<double>>() == std::vector<double>{0.9, 0.99});
    REQUIRE(j.at("sampler").at("type").get<std::string>() == "srw");
    REQUIRE(j.at("sampler").at("dim").get<int>() == 1);
}

TEST_CASE("toml-lite rejects malformed lines") {
    auto parse = [](const char* text) {
        std::stringstream in(text);
        return parse_toml_lite(in);
    };
    REQUIRE_THROWS_AS(parse("just words\n"), ParseError);
    REQUIRE_THROWS_AS(parse("[unterminated\n"), ParseError);
    REQUIRE_THROWS_AS(parse("key = \n"), ParseError);
    REQUIRE_THROWS_AS(parse("key = what?\n"), ParseError);
    REQUIRE_THROWS_AS(parse("key = \"bad\\q\"\n"), ParseError);
}

TEST_CASE("config files dispatch on extension") {
    {
        std::ofstream os("/tmp/nullhom_cfg_test.json");
        os << R"({"dim": 3, "flag": false})";
    }
    {
        std::ofstream os("/tmp/nullhom_cfg_test.toml");
        os << "dim = 3\nflag = false\n";
    }
    auto a = parse_config_file("/tmp/nullhom_cfg_test.json");
    auto b = parse_config_file("/tmp/nullhom_cfg_test.toml");
    REQUIRE(a == b);
    REQUIRE_THROWS_AS(parse_config_file("/tmp/nullhom_cfg_test.yaml"), ParseError);
    REQUIRE_THROWS_AS(parse_config_file("/tmp/does_not_exist.json"), ParseError);
}

TEST_CASE("conductance field JSON round trip") {
    auto f = ConductanceField::sample(2, 4, 0.5, 1.5, RandomSource(5, 9));
    auto j = field_to_json(f);
    auto g = field_from_json(j);
    REQUIRE(g.dim() == f.dim());
    REQUIRE(g.side() == f.side());
    REQUIRE(g.weights() == f.weights());
    REQUIRE(g.seed().seed == 5);
    REQUIRE(g.seed().stream == 9);
    REQUIRE(g.fingerprint() == f.fingerprint());

    SECTION("weights outside [a,b] are rejected") {
        auto bad = j;
        bad["weights"][0] = 99.0;
        REQUIRE_THROWS_AS(field_from_json(bad), InvalidBounds);
    }
}
