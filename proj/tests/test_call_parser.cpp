#include <doctest.h>

#include <random>

#include "toolspin/gateway.hpp"

using namespace toolspin;

TEST_CASE("a plain call list parses into name and arguments") {
    auto calls = parse_call_text("[calculate_sum(a=5, b=10)]");
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].name == "calculate_sum");
    CHECK(calls[0].arguments == json{{"a", 5}, {"b", 10}});
}

TEST_CASE("ordinary prose yields an empty list with a warning, never a throw") {
    std::vector<std::string> warnings;
    CHECK(parse_call_text("I cannot help with that.", &warnings).empty());
    CHECK(warnings.size() == 1);
    CHECK(parse_call_text("").empty());
    CHECK(parse_call_text("   ").empty());
}

TEST_CASE("quoted commas stay inside string values") {
    // Hand-built reference parse for the tricky shape.
    std::vector<tool_call> expected;
    expected.push_back({"f1", json{{"x", "a, b"}}});
    expected.push_back({"f1", json{{"x", 2}}});

    auto calls = parse_call_text("[f1(x='a, b'), f1(x=2)]");
    REQUIRE(calls.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(calls[i].name == expected[i].name);
        CHECK(calls[i].arguments.dump() == expected[i].arguments.dump());
    }
}

TEST_CASE("empty list and zero-argument calls parse") {
    CHECK(parse_call_text("[]").empty());
    auto calls = parse_call_text("[ping()]");
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].arguments == json::object());
}

TEST_CASE("python and json literal spellings both work") {
    auto calls = parse_call_text(
        "[f(a=True, b=false, c=None, d=null, e=-3, g=2.5, h=1e3, i=[1, 'x'], j={'k': 1, \"m\": [2]})]");
    REQUIRE(calls.size() == 1);
    const json & args = calls[0].arguments;
    CHECK(args["a"] == true);
    CHECK(args["b"] == false);
    CHECK(args["c"].is_null());
    CHECK(args["d"].is_null());
    CHECK(args["e"] == -3);
    CHECK(args["g"] == 2.5);
    CHECK(args["h"] == 1000.0);
    CHECK(args["i"] == json::array({1, "x"}));
    CHECK(args["j"]["k"] == 1);
    CHECK(args["j"]["m"] == json::array({2}));
}

TEST_CASE("dotted tool names are allowed") {
    auto calls = parse_call_text("[math.factorial(number=5)]");
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].name == "math.factorial");
}

TEST_CASE("string escapes round-trip") {
    auto calls = parse_call_text(R"([f(x='it\'s', y="a\"b", z='line\nbreak')])");
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].arguments["x"] == "it's");
    CHECK(calls[0].arguments["y"] == "a\"b");
    CHECK(calls[0].arguments["z"] == "line\nbreak");
}

TEST_CASE("broken inputs are rejected as a whole") {
    std::vector<std::string> warnings;
    CHECK(parse_call_text("[f(x=1) extra", &warnings).empty());
    CHECK(parse_call_text("[f(x=)]", &warnings).empty());
    CHECK(parse_call_text("[f(x='unterminated)]", &warnings).empty());
    CHECK(parse_call_text("[f(x=1)] trailing", &warnings).empty());
    CHECK(parse_call_text("[f(x=bareword)]", &warnings).empty());
    CHECK(warnings.size() == 5);
}

namespace {

json random_value(std::mt19937_64 & rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 1 ? 5 : 7);
    switch (pick(rng)) {
        case 0: return static_cast<int64_t>(std::uniform_int_distribution<long long>(-1000, 1000)(rng));
        case 1: return std::uniform_real_distribution<double>(-50.0, 50.0)(rng);
        case 2: return std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        case 3: return nullptr;
        case 4: {
            static const std::vector<std::string> pool = {
                "plain", "with, comma", "quo\"te", "apo'strophe", "new\nline", "tab\tstop", "",
                "back\\slash", "unicode £µ",
            };
            return pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
        }
        case 5: return std::uniform_int_distribution<int>(0, 1)(rng) == 1 ? json(1e30) : json(-0.125);
        case 6: {
            json arr = json::array();
            const int n = std::uniform_int_distribution<int>(0, 3)(rng);
            for (int i = 0; i < n; ++i) arr.push_back(random_value(rng, depth + 1));
            return arr;
        }
        default: {
            json obj = json::object();
            const int n = std::uniform_int_distribution<int>(0, 3)(rng);
            for (int i = 0; i < n; ++i) {
                obj["k" + std::to_string(i)] = random_value(rng, depth + 1);
            }
            return obj;
        }
    }
}

} // namespace

TEST_CASE("printing then parsing is the identity on the supported grammar") {
    std::mt19937_64 rng(20250809);
    for (int round = 0; round < 300; ++round) {
        std::vector<tool_call> calls;
        const int n_calls = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int c = 0; c < n_calls; ++c) {
            tool_call call;
            call.name = "tool_" + std::to_string(c);
            const int n_args = std::uniform_int_distribution<int>(0, 4)(rng);
            for (int a = 0; a < n_args; ++a) {
                call.arguments["arg" + std::to_string(a)] = random_value(rng, 0);
            }
            calls.push_back(std::move(call));
        }
        const std::string printed = print_call_text(calls);
        CAPTURE(printed);
        std::vector<std::string> warnings;
        auto reparsed = parse_call_text(printed, &warnings);
        CHECK(warnings.empty());
        REQUIRE(reparsed.size() == calls.size());
        for (size_t i = 0; i < calls.size(); ++i) {
            CHECK(reparsed[i].name == calls[i].name);
            CHECK(reparsed[i].arguments.dump() == calls[i].arguments.dump());
        }
    }
}
