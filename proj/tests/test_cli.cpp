#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string bin() {
    const char* b = std::getenv("SEAMSIM_BIN");
    REQUIRE(b != nullptr);
    return b;
}

std::string config_dir() {
    const char* d = std::getenv("SEAMSIM_CONFIG_DIR");
    REQUIRE(d != nullptr);
    return d;
}

int run(const std::string& args) {
    std::string cmd = bin() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    f << content;
}

} // namespace

TEST_CASE("simulate: grid product, determinism across runs and thread counts") {
    write("/tmp/ss_grid.json",
          R"({"variant":"seam","d":[3],"p":[0.002],"p_bell":[0.0,0.02],"basis":"ZX","rounds":0})");
    REQUIRE(run("simulate --spec /tmp/ss_grid.json --shots 2000 --seed 7 --threads 1 "
                "--out /tmp/ss_a.csv") == 0);
    REQUIRE(run("simulate --spec /tmp/ss_grid.json --shots 2000 --seed 7 --threads 2 "
                "--out /tmp/ss_b.csv") == 0);
    std::string a = slurp("/tmp/ss_a.csv"), b2 = slurp("/tmp/ss_b.csv");
    CHECK(a == b2); // byte-identical across thread counts
    // header + 1 variant x 1 d x 1 p x 2 p_bell x 2 bases
    int lines = 0;
    for (char ch : a) lines += ch == '\n';
    CHECK(lines == 2 + 4);
    CHECK(a.find("# seamsim csv v1") == 0);
    CHECK(slurp("/tmp/ss_a.csv.manifest.json").find("\"command\": \"simulate\"") !=
          std::string::npos);
}

TEST_CASE("simulate: p=0 rows report zero failures") {
    write("/tmp/ss_p0.json", R"({"variant":"plain","d":3,"p":0.0,"shots":100})");
    REQUIRE(run("simulate --spec /tmp/ss_p0.json --seed 3 --out /tmp/ss_p0.csv") == 0);
    std::string csv = slurp("/tmp/ss_p0.csv");
    CHECK(csv.find("plain,3,0,0,Z,X,100,0,") != std::string::npos);
}

TEST_CASE("simulate: invalid spec exits 2") {
    write("/tmp/ss_bad.json", R"({"variant":"nope","d":3})");
    CHECK(run("simulate --spec /tmp/ss_bad.json --out /tmp/ss_bad.csv") == 2);
    CHECK(run("simulate --spec /nonexistent.json --out /tmp/x.csv") == 2);
}

TEST_CASE("fit: recovers a synthetic bulk dataset and rejects degenerate input") {
    // synthetic CSV in the simulate schema
    std::string csv = "# seamsim csv v1\n";
    csv += "variant,d,p,p_bell,basis,logical,shots,failures,rounds,p_hat_k,p_hat_L,sigma,seed\n";
    double alpha = 0.05, pth = 7.43e-3;
    for (int d : {5, 7, 9}) {
        for (int i = 0; i < 6; i++) {
            double p = 2e-4 * std::pow(8.0, i / 5.0);
            double f = alpha * std::pow(p / pth, (d + 1) / 2.0);
            char row[256];
            snprintf(row, sizeof row, "plain,%d,%.8g,0,Z,X,1000000,0,%d,%.8g,%.8g,%.8g,1\n", d,
                     p, 3 * d, f, f, f / 50);
            csv += row;
        }
    }
    write("/tmp/ss_fit_in.csv", csv);
    REQUIRE(run("fit --data /tmp/ss_fit_in.csv --model bulk --out /tmp/ss_fit.json") == 0);
    std::string rep = slurp("/tmp/ss_fit.json");
    CHECK(rep.find("\"alpha\"") != std::string::npos);
    CHECK(rep.find("\"chi2\"") != std::string::npos);

    // seam model on a p_bell = 0 dataset is degenerate -> exit 3
    CHECK(run("fit --data /tmp/ss_fit_in.csv --model seam --out /tmp/ss_fit2.json") == 3);

    // empty post-filter dataset -> error exit
    std::string empty = "# seamsim csv v1\n";
    empty += "variant,d,p,p_bell,basis,logical,shots,failures,rounds,p_hat_k,p_hat_L,sigma,seed\n";
    empty += "plain,3,0.001,0,Z,X,100,0,9,0,0,0,1\n";
    write("/tmp/ss_empty.csv", empty);
    CHECK(run("fit --data /tmp/ss_empty.csv --model bulk --out /tmp/ss_fit3.json") == 3);
}

TEST_CASE("estimate: default config produces a table with overheads") {
    REQUIRE(run("estimate --config " + config_dir() + "/estimate_default.json --out "
                "/tmp/ss_est.csv") == 0);
    std::string csv = slurp("/tmp/ss_est.csv");
    CHECK(csv.find("p_bell,mode,d,") != std::string::npos);
    CHECK(csv.find("distributed") != std::string::npos);
    CHECK(csv.find("monolithic") != std::string::npos);
    // reference column has zero overhead against itself
    CHECK(csv.find(",0.0,0.0\n") != std::string::npos);

    write("/tmp/ss_est_bad.json", R"({"p":1e-3,"factories":[],"algorithm_costs":[]})");
    CHECK(run("estimate --config /tmp/ss_est_bad.json --out /tmp/x.csv") != 0);
}

TEST_CASE("dem and decode-test commands") {
    write("/tmp/ss_patch.json", R"({"variant":"seam","d":3,"rounds":4,"p":1e-3,"p_bell":0.01})");
    REQUIRE(run("dem --spec /tmp/ss_patch.json --out /tmp/ss_dem.txt") == 0);
    std::string dem = slurp("/tmp/ss_dem.txt");
    CHECK(dem.find("SEAMSIM DEM v1") == 0);
    CHECK(dem.find("error(") != std::string::npos);

    CHECK(run("decode-test --spec /tmp/ss_patch.json --trials 200 --seed 5") == 0);
}
