#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
    int code = -1;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

const char* cli() {
    const char* env = std::getenv("BS_CLI");
    return env ? env : BS_CLI_PATH;
}

Run run(const std::string& args, const std::string& err_file = "/dev/null") {
    Run r;
    std::string cmd = quote(cli()) + " " + args + " 2>" + err_file;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Scratch {
    fs::path p;
    Scratch() {
        p = fs::temp_directory_path() / ("bs_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~Scratch() { fs::remove_all(p); }
    std::string file(const std::string& name, const std::string& text) const {
        std::ofstream(p / name) << text;
        return (p / name).string();
    }
};

const char* kDixonLhs = "sum(k,0,2*n,(-1)^k*binom(2*n,k)^3)";
const char* kDixonRhs = "(-1)^n*binom(3*n,n)*binom(2*n,n)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("subcommands and exit codes") {
    Scratch s;
    std::string dent = s.file("dent.bs",
                              "#params n1 n2\n"
                              "sum(k, 0, n1+2*n2, sum(j, 0, k, (-1)^j * binom(k,j) * binom(2*n2+n1-k, 2*n2-j) * "
                              "binom(n1, k-j)))\n");
    Run r = run("reduce " + quote(dent) + " --json --no-cache");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["residue_vars"].empty());
    CHECK(j["fun"] == "1/(1-2*t1-t2)");

    r = run("expand 'delta(n)' -n 2 --no-cache");
    CHECK(r.code == 0);
    CHECK(r.out == "1 0 0\n");

    r = run("expand '#params a b\nbinom(a+b,a)' -n 1 --no-cache");
    CHECK(r.out == "1 1\n1 2\n");

    r = run("prove " + quote(kDixonLhs) + " " + quote(kDixonRhs) + " --no-cache");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PROVED\n", 0) == 0);

    r = run("prove 'H(n)' 'H(n)+delta(n-3)' --json --no-cache");
    CHECK(r.code == 1);
    j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "REFUTED");
    CHECK(j["witness"] == nlohmann::json::array({3}));

    r = run("rec 'binom(2*n,n)' --json --no-cache");
    CHECK(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["inits"]["0"] == "1");
    CHECK(j["provenance"] == "CERTIFIED");

    r = run("ode " + quote(kDixonLhs) + " --json --no-cache");
    j = nlohmann::json::parse(r.out);
    CHECK(j["coeffs"] == nlohmann::json::parse(R"([["6"],["1","54"],["0","1","27"]])"));

    CHECK(run("ode 'binom(' --no-cache").code == 3);
    CHECK(run("").code == 3);
    CHECK(run("frobnicate x").code == 3);
    CHECK(run("expand 'H(n)' -n -1").code == 3);
    CHECK(run("prove 'H(n)' 'H(m)' --no-cache").code == 3);

    // bounds too small for both the telescoper and the guesser
    r = run("prove " + quote(kDixonLhs) + " " + quote(kDixonRhs) + " --max-order 1 --max-degree 1 --no-cache");
    CHECK(r.code == 2);
    CHECK(r.out.rfind("BUDGET_EXCEEDED\n", 0) == 0);
}

TEST_CASE("json output is deterministic") {
    for (const std::string& args :
         {"ode " + quote(kDixonLhs), "prove " + quote(kDixonLhs) + " " + quote(kDixonRhs), std::string("reduce 'sum(k,0,n,binom(n,k))'")}) {
        Run a = run(args + " --json --no-cache"), b = run(args + " --json --no-cache");
        CHECK(a.code == 0);
        CHECK(!a.out.empty());
        CHECK(a.out == b.out);
    }
}

TEST_CASE("second ode run is a cache hit") {
    Scratch s;
    fs::path dir = s.p / "cache", err = s.p / "err.txt";
    std::string args = "ode " + quote(kDixonLhs) + " --cache-dir " + quote(dir.string());
    Run a = run(args, err.string());
    CHECK(a.code == 0);
    CHECK(slurp(err).find("cache hit") == std::string::npos);
    Run b = run(args, err.string());
    CHECK(b.out == a.out);
    CHECK(slurp(err).find("cache hit") != std::string::npos);

    // the environment variable supplies the default directory
    std::string env = "BS_CACHE_DIR=" + quote(dir.string()) + " ";
    std::string cmd = env + quote(cli()) + " ode " + quote(kDixonLhs) + " 2>" + quote(err.string()) + " >/dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(err).find("cache hit") != std::string::npos);

    fs::remove_all(dir);
    Run c = run(args, err.string());
    CHECK(c.out == a.out);
    CHECK(slurp(err).find("cache hit") == std::string::npos);
}

TEST_CASE("fast corpus entries pass") {
    const char* dir = std::getenv("BS_CORPUS");
    if (!dir) dir = BS_CORPUS_DIR;
    Run r = run(std::string("corpus --json --no-cache --jobs 2 --dir ") + quote(dir));
    CHECK_MESSAGE(r.code == 0, r.out);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["failed"] == 0);
    CHECK(j["entries"].size() >= 10);
}

}
