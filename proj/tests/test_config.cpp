#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "l2morse/config.hpp"

using namespace l2morse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
        return "";
    } catch (const std::exception& e) {
        return e.what();
    }
}

} // namespace

TEST_CASE("defaults survive an empty config") {
    const auto cfg = parse_config("");
    CHECK(cfg.base == "circle");
    CHECK(cfg.p == 3);
    CHECK(cfg.q == 3);
    CHECK(cfg.kind == "lattice");
    CHECK(cfg.rank == 1);
    CHECK(cfg.order == 4);
    CHECK(cfg.pattern == "none");
    CHECK(cfg.c == 1);
    CHECK(cfg.amplitude == 0.3);
    CHECK(cfg.s == 1.0);
    CHECK(cfg.t_list == std::vector<double>{0.0});
    CHECK(cfg.window_radius == 0);
    CHECK(cfg.cheb_eps == 1e-8);
    CHECK(cfg.folner_kmin == 2);
    CHECK(cfg.folner_kmax == 10);
    CHECK(cfg.ker_tol == 1e-8);
    CHECK(cfg.rank_tol == 1e-10);
    CHECK(cfg.seed == 1);
    CHECK(cfg.samples == 64);
    CHECK(cfg.tol == 1e-6);
    CHECK(cfg.pairs == 100);
}

TEST_CASE("a full config parses with comments and both list separators") {
    const std::string text =
        "# experiment\n"
        "[complex]\n"
        "base = torus\n"
        "p = 4\n"
        "q = 5  # five around\n"
        "edge_weight = 2.5\n"
        "[group]\n"
        "kind = lattice\n"
        "rank = 2\n"
        "[morse]\n"
        "pattern = zigzag\n"
        "c = 2\n"
        "[run]\n"
        "s = 0.5\n"
        "t_list = 0.5, 1, 2\n"
        "samples = 32\n"
        "seed = 99\n";
    const auto cfg = parse_config(text);
    CHECK(cfg.base == "torus");
    CHECK(cfg.p == 4);
    CHECK(cfg.q == 5);
    CHECK(cfg.edge_weight == 2.5);
    CHECK(cfg.rank == 2);
    CHECK(cfg.pattern == "zigzag");
    CHECK(cfg.c == 2);
    CHECK(cfg.s == 0.5);
    CHECK(cfg.t_list == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(cfg.samples == 32);
    CHECK(cfg.seed == 99);
    const auto space_sep = parse_config("[run]\nt_list = 1 2 4\n");
    CHECK(space_sep.t_list == std::vector<double>{1.0, 2.0, 4.0});
}

TEST_CASE("structural errors name the offending line") {
    CHECK(error_of("[complex]\np = 3\np = 4\n").find("line 3") != std::string::npos);
    CHECK(error_of("[complex]\np = 3\np = 4\n").find("first set at line 2") != std::string::npos);
    CHECK(error_of("[what]\n").find("unknown section") != std::string::npos);
    CHECK(error_of("[run]\nbanana = 7\n").find("unknown key run.banana") != std::string::npos);
    CHECK(error_of("[run]\nbanana = 7\n").find("line 2") != std::string::npos);
    CHECK(error_of("p = 3\n").find("outside any section") != std::string::npos);
    CHECK(error_of("[complex\n").find("unterminated") != std::string::npos);
    CHECK(error_of("[run]\nno_equals_here\n").find("key = value") != std::string::npos);
}

TEST_CASE("type errors carry the key, the line, and the offending token") {
    const auto e1 = error_of("[complex]\np = three\n");
    CHECK(e1.find("complex.p") != std::string::npos);
    CHECK(e1.find("expected an integer") != std::string::npos);
    CHECK(e1.find("'three'") != std::string::npos);
    CHECK(e1.find("line 2") != std::string::npos);
    CHECK(error_of("[run]\ns = fast\n").find("expected a real number") != std::string::npos);
    CHECK(error_of("[run]\nt_list = 1 two\n").find("expected real numbers") != std::string::npos);
    CHECK(error_of("[run]\nt_list =\n").find("empty list") != std::string::npos);
    CHECK(error_of("[complex]\nbase = klein\n").find("expected one of") != std::string::npos);
}

TEST_CASE("cross-field consistency is enforced at the offending key") {
    CHECK(error_of("[group]\nkind = cyclic\nrank = 2\n").find("group.rank") !=
          std::string::npos);
    CHECK(error_of("[group]\nkind = lattice\norder = 6\n").find("group.order") !=
          std::string::npos);
    CHECK(error_of("[complex]\nbase = circle\nq = 4\n").find("torus base only") !=
          std::string::npos);
    CHECK(error_of("[complex]\nbase = circle\nface_weight = 2\n").find("face_weight") !=
          std::string::npos);
    CHECK(error_of("[complex]\nbase = file\n").find("complex.path is required") !=
          std::string::npos);
    CHECK(error_of("[complex]\npath = /tmp/x\n").find("base = file") != std::string::npos);
    CHECK(error_of("[morse]\npattern = file\n").find("morse.path is required") !=
          std::string::npos);
    CHECK(error_of("[morse]\npath = /tmp/x\n").find("pattern = file") != std::string::npos);
    const auto e = error_of("[morse]\npattern = file\npath = /tmp/x\n");
    CHECK(e.find("window_radius") != std::string::npos);
    // ranges
    CHECK(error_of("[group]\nrank = 9\n").find("[1, 4]") != std::string::npos);
    CHECK(error_of("[morse]\namplitude = 0.9\n").find("[0, 0.6]") != std::string::npos);
    CHECK(error_of("[run]\ncheb_eps = 0.5\n").find("(0, 1e-2]") != std::string::npos);
    CHECK(error_of("[run]\nfolner_kmin = 9\nfolner_kmax = 3\n").find("folner_kmax") !=
          std::string::npos);
}

TEST_CASE("oracle-betti runs are reproducible byte for byte") {
    const auto cfg = parse_config("[run]\nsamples = 24\nseed = 3\n");
    const fs::path dir1 = "/tmp/l2morse_cfg_run1";
    const fs::path dir2 = "/tmp/l2morse_cfg_run2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    CHECK(run_experiment(cfg, "oracle-betti", dir1.string()) == 0);
    CHECK(run_experiment(cfg, "oracle-betti", dir2.string()) == 0);
    const auto a = slurp(dir1 / "betti.csv");
    const auto b = slurp(dir2 / "betti.csv");
    CHECK(a == b);
    CHECK(a.find("degree,value,method,tolerance,samples") == 0);
    CHECK(a.find("floquet") != std::string::npos);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("morse-verify writes the two-stanza ledger and reports success") {
    const auto cfg = parse_config(
        "[morse]\npattern = zigzag\n"
        "[run]\nfolner_kmin = 2\nfolner_kmax = 6\nsamples = 24\nt_list = 1\n");
    const fs::path dir = "/tmp/l2morse_cfg_mv";
    fs::remove_all(dir);
    CHECK(run_experiment(cfg, "morse-verify", dir.string()) == 0);
    const auto ledger = slurp(dir / "ledger.csv");
    CHECK(ledger.find("k,lhs_avg,rhs,verdict,folner_k,defect") == 0);
    // 2 count rows + 2 heat rows + header
    int lines = 0;
    for (char ch : ledger)
        if (ch == '\n') ++lines;
    CHECK(lines == 5);
    fs::remove_all(dir);
}

TEST_CASE("unknown command is rejected") {
    const auto cfg = parse_config("");
    CHECK_THROWS(run_experiment(cfg, "make-coffee", "/tmp/l2morse_cfg_bad"));
}
