#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "nlclaw/config.hpp"

using namespace nlclaw;

namespace {

struct TempConfig {
    std::string path;
    explicit TempConfig(const std::string& body, const char* name = "cfg") {
        path = std::string("/tmp/nlclaw_test_") + name + ".toml";
        std::ofstream out(path);
        out << body;
    }
    ~TempConfig() { std::remove(path.c_str()); }
};

bool any_error_contains(const ParsedConfig& p, const std::string& needle) {
    for (const ConfigError& e : p.errors)
        if (e.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
    TempConfig f(R"(preset = "hks"

[grid]
n = 128

[problem]
epsilon = 0.001
horizon = 0.2

[u0]
type = "sine"
mean = 0.5
amplitude = 0.4
)");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.ok());
    CHECK(p.config.preset == "hks");
    CHECK(p.config.grid.n == 128);
    CHECK(p.config.grid.dim == 1);
    CHECK(p.config.grid.length == 1.0);
    CHECK(p.config.problem.epsilon == 0.001);
    CHECK(p.config.problem.horizon == 0.2);
    CHECK(p.config.problem.cfl_advection == 0.45);
    CHECK(p.config.u0.kind == U0Spec::Kind::sine);
    CHECK(p.config.u0.mean == 0.5);
    CHECK(p.config.u0.amplitude == 0.4);
    CHECK(p.config.u0.frequency == 1);
    CHECK(p.config.has_u0);
    CHECK(p.config.tv_bound_uses == "full");
    CHECK(p.config.ode_constant == 1.0);
    CHECK(p.config.seed == 0);
    CHECK(p.config.output.count == 9);
    CHECK(p.config.output.dir == "out");
    CHECK(!p.config.output.write_snapshots);
    CHECK(p.config.lemmas.trials == 100);
    CHECK(p.config.lemmas.size == 64);
}

TEST_CASE("every field round-trips") {
    TempConfig f(R"(# full exercise
seed = 42
tv_bound_uses = "divergence"
ode_constant = 0.5

[grid]
dim = 2
n = 32
length = 2.0

[kernel]
type = "gaussian-gradient"   # dashes work
sigma = 0.08

[mobility]
type = "polynomial"
coeffs = [0.0, 1.0, -1.0]

[problem]
epsilon = 0.01
horizon = 0.5
cfl_advection = 0.4
cfl_diffusion = 0.3
blowup_threshold = 100.0
support_fraction = 0.8

[u0]
type = "gaussian-bump"
amplitude = 0.9
width = 0.05
center = 0.1
baseline = 0.2

[output]
dir = "results/run1"
times = [0.1, 0.2, 0.5]
write_snapshots = true

[rate_study]
epsilons = [0.004, 0.002, 0.001, 0.0005]
horizon = 0.25

[stability]
horizon = 0.15

[lemmas]
trials = 50
size = 32

[kuznetsov]
delta = 0.1
eta = 0.02
epsilon_viscous = 0.05
snapshots = 16
horizon = 0.3

[picard]
t_short = 0.02
iterations = 6
substeps = 128

[bounds]
horizon = 0.4
count = 21
)", "full");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.ok());
    const RunConfig& c = p.config;
    CHECK(c.seed == 42);
    CHECK(c.tv_bound_uses == "divergence");
    CHECK(c.ode_constant == 0.5);
    CHECK(c.grid.dim == 2);
    CHECK(c.grid.n == 32);
    CHECK(c.grid.length == 2.0);
    CHECK(c.kernel.type == KernelSpec::Type::gaussian_gradient);
    CHECK(c.kernel.sigma == 0.08);
    CHECK(c.mobility.type == MobilitySpec::Type::polynomial);
    CHECK(c.mobility.coeffs == std::vector<double>{0.0, 1.0, -1.0});
    CHECK(c.problem.cfl_diffusion == 0.3);
    CHECK(c.problem.blowup_threshold == 100.0);
    CHECK(c.problem.support_fraction == 0.8);
    CHECK(c.u0.kind == U0Spec::Kind::gaussian_bump);
    CHECK(c.u0.bump_amplitude == 0.9);
    CHECK(c.u0.width == 0.05);
    CHECK(c.u0.center == 0.1);
    CHECK(c.u0.baseline == 0.2);
    CHECK(c.output.dir == "results/run1");
    CHECK(c.output.times == std::vector<double>{0.1, 0.2, 0.5});
    CHECK(c.output.write_snapshots);
    CHECK(c.rate.epsilons == std::vector<double>{0.004, 0.002, 0.001, 0.0005});
    CHECK(c.rate.horizon == 0.25);
    CHECK(c.stability.horizon == 0.15);
    CHECK(c.lemmas.trials == 50);
    CHECK(c.lemmas.size == 32);
    CHECK(c.kuznetsov.delta == 0.1);
    CHECK(c.kuznetsov.epsilon_viscous == 0.05);
    CHECK(c.kuznetsov.snapshots == 16);
    CHECK(c.picard.t_short == 0.02);
    CHECK(c.picard.iterations == 6);
    CHECK(c.picard.substeps == 128);
    CHECK(c.bounds.horizon == 0.4);
    CHECK(c.bounds.count == 21);
}

TEST_CASE("range violations name the key and line") {
    TempConfig f(R"([problem]
epsilon = -1.0
)", "range");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.errors.size() == 1);
    CHECK(p.errors[0].key == "epsilon");
    CHECK(p.errors[0].line == 2);
    CHECK(p.errors[0].message == "epsilon must be nonnegative");
}

TEST_CASE("legacy spelling gets a pointed suggestion") {
    TempConfig f(R"([problem]
viscocity = 0.01
)", "alias");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.errors.size() == 1);
    CHECK(any_error_contains(p, "did you mean 'epsilon'?"));
}

TEST_CASE("near-miss keys get a nearest-neighbor suggestion") {
    TempConfig f(R"([problem]
horizn = 0.5
)", "nearmiss");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.errors.size() == 1);
    CHECK(any_error_contains(p, "unknown key 'horizn'"));
    CHECK(any_error_contains(p, "did you mean 'horizon'?"));
}

TEST_CASE("all violations are reported together") {
    TempConfig f(R"([grid]
dim = 3
n = 4

[kernel]
type = "gaussian-gradient"
sigma = -0.1

[problem]
epsilon = -2.0
horizon = -1.0
)", "multi");
    ParsedConfig p = parse_config(f.path);
    CHECK(p.errors.size() == 5);
    CHECK(p.errors[0].line == 2);   // dim
    CHECK(p.errors[1].line == 3);   // n
    CHECK(p.errors[2].line == 7);   // sigma
    CHECK(p.errors[3].line == 10);  // epsilon
    CHECK(p.errors[4].line == 11);  // horizon
}

TEST_CASE("unknown sections swallow their keys") {
    TempConfig f(R"([grid]
n = 64

[nonsense]
foo = 1
bar = 2

[problem]
epsilon = 0.01
)", "section");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.errors.size() == 1);
    CHECK(any_error_contains(p, "unknown section [nonsense]"));
    CHECK(p.config.grid.n == 64);
    CHECK(p.config.problem.epsilon == 0.01);
}

TEST_CASE("array and ordering violations") {
    TempConfig bad_order(R"([output]
times = [0.2, 0.1]
)", "order");
    ParsedConfig p1 = parse_config(bad_order.path);
    CHECK(!p1.ok());
    CHECK(any_error_contains(p1, "strictly increasing"));

    TempConfig unterminated(R"([output]
times = [0.1, 0.2
)", "unterm");
    ParsedConfig p2 = parse_config(unterminated.path);
    CHECK(!p2.ok());

    TempConfig rising(R"([rate_study]
epsilons = [0.001, 0.002, 0.004, 0.008]
)", "rising");
    ParsedConfig p3 = parse_config(rising.path);
    CHECK(!p3.ok());
    CHECK(any_error_contains(p3, "strictly decreasing"));

    TempConfig negeps(R"([rate_study]
epsilons = [0.004, 0.002, -0.001, 0.0005]
)", "negeps");
    ParsedConfig p4 = parse_config(negeps.path);
    CHECK(!p4.ok());
}

TEST_CASE("strings keep their hash marks, comments are stripped") {
    TempConfig f(R"(# top comment
[output]
dir = "runs/with#hash"  # trailing comment

[u0]
type = "constant"
value = 0.5   # this part goes
)", "comments");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.ok());
    CHECK(p.config.output.dir == "runs/with#hash");
    CHECK(p.config.u0.value == 0.5);
}

TEST_CASE("referenced files must exist") {
    TempConfig f(R"([kernel]
type = "file"
path = "/nonexistent/kernel.snap"
)", "nofile");
    ParsedConfig p = parse_config(f.path);
    CHECK(!p.ok());

    TempConfig f2(R"([kernel]
type = "file"
)", "nopath");
    ParsedConfig p2 = parse_config(f2.path);
    CHECK(!p2.ok());
    CHECK(any_error_contains(p2, "file kernel needs a path"));

    TempConfig f3(R"([u0]
type = "file"
)", "nou0path");
    ParsedConfig p3 = parse_config(f3.path);
    CHECK(!p3.ok());
    CHECK(any_error_contains(p3, "file u0 needs a path"));
}

TEST_CASE("output times must respect the horizon") {
    TempConfig f(R"([problem]
horizon = 0.1

[output]
times = [0.05, 0.2]
)", "horizoncross");
    ParsedConfig p = parse_config(f.path);
    REQUIRE(p.errors.size() == 1);
    CHECK(p.errors[0].line == 0);
    CHECK(p.errors[0].key == "output.times");
    CHECK(any_error_contains(p, "exceed the horizon"));
}

TEST_CASE("error formatting is path:line (key): message") {
    TempConfig f(R"([problem]
epsilon = -1.0
)", "fmt");
    ParsedConfig p = parse_config(f.path);
    const std::string msg = format_errors(p, f.path);
    CHECK(msg == f.path + ":2 (epsilon): epsilon must be nonnegative\n");
}

TEST_CASE("missing config file is a parse error, not a crash") {
    ParsedConfig p = parse_config("/nonexistent/nlclaw.toml");
    CHECK(!p.ok());
}

TEST_CASE("config fingerprint is standard FNV-1a") {
    const auto hash_of = [](const std::string& body) {
        TempConfig f(body, "hash");
        return fnv1a_file_hash(f.path);
    };
    CHECK(hash_of("") == 14695981039346656037ull);
    CHECK(hash_of("a") == 12638187200555641996ull);
    CHECK(hash_of("abc") == 16654208175385433931ull);
    CHECK(hash_of("[grid]\nn = 64\n") == 16039802266687924058ull);
    CHECK(hash_of("abc") == hash_of("abc"));
    CHECK(hash_of("abd") != hash_of("abc"));
    CHECK_THROWS_AS(fnv1a_file_hash("/nonexistent/file"), error);
}
