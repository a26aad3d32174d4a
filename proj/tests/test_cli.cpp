#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "starnet_cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "starnet");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = starnet::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "starnet_cli_test";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("sweep-cv output shape", "[cli]") {
    const Run r = run({"sweep-cv", "--steps", "11", "--tau-max", "1"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 12);
    CHECK(ls[0] == "g,E_N3,E_N4,E_N5");
    CHECK(ls[1] == "0,0,0,0");
    CHECK(r.out.find('\r') == std::string::npos);
    CHECK(r.out.back() == '\n');

    const Run p = run({"sweep-cv", "--n", "2", "--steps", "3", "--pipeline"});
    REQUIRE(p.code == 0);
    CHECK(lines(p.out)[0] == "g,E_N2,E_N2_pipeline");
}

TEST_CASE("sweep-cv peak at g = pi / (2 sqrt N)", "[cli]") {
    // With the grid anchored at the N = 2 peak the value is e^r - 1.
    const double g = std::numbers::pi / (2.0 * std::sqrt(2.0));
    const Run r = run({"sweep-cv", "--n", "2", "--r", "0.8", "--steps", "2", "--tau-min", "0", "--tau-max",
                       starnet::format_real(g)});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    const double e = std::stod(ls[2].substr(ls[2].find(',') + 1));
    CHECK_THAT(e, Catch::Matchers::WithinAbs(std::expm1(0.8), 1e-10));
}

TEST_CASE("deltas and qubit-table", "[cli]") {
    const Run d = run({"deltas", "--n", "5"});
    REQUIRE(d.code == 0);
    const auto dl = lines(d.out);
    REQUIRE(dl.size() == 4);
    CHECK(dl[0] == "N,delta_1,delta_cv");
    CHECK(dl[1] == "3,0.497341283109,0.344987240564");

    const Run q = run({"qubit-table", "--n", "3"});
    REQUIRE(q.code == 0);
    const auto ql = lines(q.out);
    REQUIRE(ql.size() == 3);
    CHECK(ql[0] == "N,C_max_measured,C_max_closed_form,NPT_max_measured,NPT_max_closed_form");
    CHECK(ql[1] == "2,1,1,1,1");
    CHECK(ql[2].rfind("3,0.666666666667,0.666666666667,0.412022659167,0.412022659167", 0) == 0);
}

TEST_CASE("transfer-demo probabilities sum to one", "[cli]") {
    const Run r = run({"transfer-demo", "--steps", "21"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 22);
    CHECK(ls[0] == "g,P_root,P_b1,P_b2");
    CHECK(ls[1] == "0,0,1,0");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        std::istringstream row(ls[k]);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        REQUIRE(v.size() == 4);
        CHECK_THAT(v[1] + v[2] + v[3], Catch::Matchers::WithinAbs(1.0, 1e-11));
    }
}

TEST_CASE("compile prints the element list", "[cli]") {
    const Run r = run({"compile", "--n", "4", "--tau", "0.5"});
    REQUIRE(r.code == 0);
    std::size_t rs = 0;
    std::size_t bs = 0;
    for (const auto& l : lines(r.out)) {
        rs += l.rfind("R ", 0) == 0 ? 1 : 0;
        bs += l.rfind("BS ", 0) == 0 ? 1 : 0;
    }
    CHECK(rs == 6);
    CHECK(bs == 7);

    const Run c = run({"compile", "--couplings", "3,4", "--tau", "1"});
    REQUIRE(c.code == 0);
    CHECK(lines(c.out)[0] == "BS 2 1 0.643501108793 0");
}

TEST_CASE("output is deterministic", "[cli]") {
    const Run a = run({"sweep-cv", "--steps", "51", "--r", "1.3"});
    const Run b = run({"sweep-cv", "--steps", "51", "--r", "1.3"});
    CHECK(a.out == b.out);
}

TEST_CASE("validation failures exit with 1", "[cli][errors]") {
    CHECK(run({}).code == 1);
    CHECK(run({"no-such-command"}).code == 1);
    CHECK(run({"sweep-cv", "--steps", "1"}).code == 1);
    CHECK(run({"sweep-cv", "--tau-min", "2", "--tau-max", "1"}).code == 1);
    CHECK(run({"sweep-cv", "--n", "1"}).code == 1);
    CHECK(run({"sweep-cv", "--r", "-0.5"}).code == 1);
    CHECK(run({"sweep-cv", "--couplings", "1,2,3"}).code == 1);
    CHECK(run({"sweep-cv", "--steps", "abc"}).code == 1);
    CHECK(run({"deltas", "--n", "2"}).code == 1);
    CHECK(run({"deltas", "--n", "51"}).code == 1);
    CHECK(run({"deltas", "--r", "0"}).code == 1);
    CHECK(run({"qubit-table", "--n", "1"}).code == 1);
    CHECK(run({"transfer-demo", "--n", "3"}).code == 1);
    CHECK(run({"transfer-demo", "--couplings", "1"}).code == 1);
    CHECK(run({"compile", "--couplings", "0,0"}).code == 1);
    CHECK(run({"compile", "--n", "0"}).code == 1);
    CHECK(run({"verify", "--cutoff", "1"}).code == 1);
    const Run r = run({"deltas", "--n", "2"});
    CHECK(r.out.empty());
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("verify exit codes", "[cli][verify]") {
    const Run ok = run({"verify"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("[FAIL]") == std::string::npos);
    const Run bad = run({"verify", "--inject-bs-sign-flip"});
    CHECK(bad.code == 2);
    CHECK(bad.out.find("[FAIL] decomposition") != std::string::npos);
}

TEST_CASE("file output and I/O errors", "[cli][io]") {
    const fs::path dir = scratch_dir();
    const fs::path good = dir / "deltas.csv";
    fs::remove(good);
    const Run r = run({"deltas", "--n", "4", "--out", good.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(good) == run({"deltas", "--n", "4"}).out);

    // Validation failure must not leave a file behind.
    const fs::path rejected = dir / "rejected.csv";
    fs::remove(rejected);
    CHECK(run({"deltas", "--n", "2", "--out", rejected.string()}).code == 1);
    CHECK_FALSE(fs::exists(rejected));

    const fs::path unwritable = dir / "missing-dir" / "out.csv";
    CHECK(run({"deltas", "--out", unwritable.string()}).code == 3);
    CHECK_FALSE(fs::exists(unwritable));
}
