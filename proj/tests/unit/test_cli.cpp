#include "doctest.h"

#include "opdual/cli.hpp"

#include <sstream>

using namespace opdual;

namespace {

Field Q = Field::rationals();

std::string data(const char* f) { return std::string(OPDUAL_TEST_DATA) + "/" + f; }

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "opdual");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("operad spec files") {
    auto p = load_operad_spec(read_json_file(data("com3.json")), 3);
    auto com = builtin_operad("com", Q, 3);
    for (int n = 1; n <= 3; ++n) CHECK(p->term(n)->dims() == com->term(n)->dims());
    for (const auto& [key, m] : com->circ) CHECK(equal(Q, m, p->circ_at(std::get<0>(key), std::get<1>(key), std::get<2>(key))));

    try {
        load_operad_spec(read_json_file(data("broken_assoc.json")), 4);
        FAIL("broken spec loaded");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("assoc-seq(2,2,2,1,1)") != std::string::npos);
    }
    CHECK_NOTHROW(load_operad_spec(read_json_file(data("f2_generator.json")), 3));
    CHECK_THROWS_AS(load_operad_spec(read_json_file(data("f2_bad_d.json")), 3), InputError);
    CHECK_THROWS_AS(load_operad_spec(read_json_file(data("com3.json")), 4), InputError);
    CHECK_THROWS_AS(read_json_file(data("missing.json")), InputError);
}

TEST_CASE("selectors") {
    CHECK(select_operad("com<=2", Q, 4)->term(3)->dim() == 0);
    CHECK(select_operad("ass\xE2\x89\xA4" "3", Q, 4)->term(3)->dim() == 6);
    CHECK(select_operad("free:" + data("binary.json"), Q, 4)->term(4)->dim() == 15);
    CHECK(select_operad("trivial:" + data("binary.json"), Q, 4)->term(3)->dim() == 0);
    CHECK_THROWS_AS(select_operad("com<=9", Q, 4), InputError);
    CHECK_THROWS_AS(select_operad("lie", Q, 4), InputError);
}

TEST_CASE("verbs and exit codes") {
    auto t = cli({"trees", "--max-arity", "5", "--out", "tsv"});
    CHECK(t.code == 0);
    CHECK(t.out.find("5\t0\t236\n") != std::string::npos);

    auto b = cli({"bar", "--operad", "com", "--max-arity", "4", "--homology", "--field", "q"});
    CHECK(b.code == 0);
    auto j = nlohmann::json::parse(b.out);
    CHECK(j["tables"]["H(BP)"]["2"] == nlohmann::json{{"1", 1}});
    CHECK(j["tables"]["H(BP)"]["3"] == nlohmann::json{{"2", 2}});
    CHECK(j["tables"]["H(BP)"]["4"] == nlohmann::json{{"3", 6}});
    CHECK(j["command"] == "bar");
    CHECK(j["max_arity"] == 4);
    CHECK(b.out == cli({"bar", "--operad", "com", "--max-arity", "4", "--homology", "--field", "q"}).out);

    auto f2 = cli({"bar", "--operad", "com", "--max-arity", "4", "--homology", "--field", "f2"});
    CHECK(nlohmann::json::parse(f2.out)["tables"]["H(BP)"] == j["tables"]["H(BP)"]);

    auto th = cli({"check", "theta", "--operad", "ass", "--max-arity", "3"});
    CHECK(th.code == 0);
    CHECK(th.out.find("theta-invertible(3)") != std::string::npos);

    for (const char* v : {"cobar", "w", "koszul", "kk"}) CHECK_MESSAGE(cli({v, "--operad", "com", "--max-arity", "3"}).code == 0, v);
    for (const char* w : {"axioms", "w", "quasi", "adjunction"})
        CHECK_MESSAGE(cli({"check", w, "--operad", "com", "--max-arity", "3", "--seed", "4"}).code == 0, w);
    CHECK(cli({"w", "--operad", "file:" + data("com3.json"), "--max-arity", "3"}).code == 0);
    CHECK(cli({"kk", "--operad", "free:" + data("binary.json"), "--max-arity", "3", "--out", "tsv"}).code == 0);

    CHECK(cli({"bar", "--operad", "file:" + data("broken_assoc.json"), "--max-arity", "4"}).code == 2);
    CHECK(cli({"bar", "--operad", "file:" + data("f2_bad_d.json"), "--max-arity", "3"}).code == 2);
    CHECK(cli({"bar", "--operad", "nope"}).code == 2);
    CHECK(cli({"bar", "--field", "x"}).code == 2);
    CHECK(cli({"bar", "--max-arity", "0"}).code == 2);
    CHECK(cli({"check", "nothing"}).code == 2);
    CHECK(cli({}).code == 2);

    auto v = cli({"bar", "--operad", "com", "--max-arity", "3", "--verbose"});
    CHECK(nlohmann::json::parse(v.out)["matrices"]["BP"]["3"]["degrees"].size() == 4);
}

}
