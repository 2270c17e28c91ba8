#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "epiwarn/errors.hpp"
#include "epiwarn/io.hpp"
#include "epiwarn/pipeline.hpp"
#include "support.hpp"

using namespace epiwarn;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.seed = 42;
    c.out = out;
    c.noise_kinds = {NoiseKind::White};
    c.include_mixed = false;
    c.train_per_class = 20;
    c.test_per_class = 10;
    c.feature_sets = {FeatureSet::EWSI5};
    c.model_kinds = {ModelKind::LRM};
    return c;
}

std::vector<std::string> lines(const fs::path& p) {
    std::istringstream in(read_text(p));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EPIWARN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("naming and formatting") {
    CHECK(classifier_name('W', FeatureSet::EWSI5, ModelKind::GBM) == "W5G");
    CHECK(classifier_name(dataset_code(std::nullopt), FeatureSet::SF22, ModelKind::SVM) == "M22S");
    CHECK(format_accuracy_cell(1.0, accuracy_ci(1.0, 19)) == "1 (±0.0000)");
    CHECK(format_accuracy_cell(18.0 / 19.0, accuracy_ci(18.0 / 19.0, 19)) == "0.9474 (±0.1004)");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(parse_sweep_kind("expanding") == SweepKind::Expanding);
}

TEST_CASE("config validation names the field") {
    RunConfig c = small_config("x");
    c.train_per_class = 0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("train_per_class"), ValidationError);
    c = small_config("x");
    c.seed.reset();
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("seed"), ValidationError);
    RunConfig d;
    apply_desk_scale(d);
    CHECK(d.train_per_class == 600);
    CHECK(d.test_per_class == 150);
}

TEST_CASE("experiment writes one report per classifier, reproducibly") {
    const auto dir = testing_support::scratch_dir("experiment");
    auto cfg = small_config(dir / "run1" / "nested");
    cmd_experiment(cfg);
    const auto rep = lines(cfg.out / "reports.csv");
    REQUIRE(rep.size() == 2);
    CHECK(rep[1].rfind("W5L,", 0) == 0);
    CHECK(fs::exists(cfg.out / "manifest.json"));
    CHECK(fs::exists(cfg.out / "models" / "W5L.json"));

    auto cfg2 = small_config(dir / "run2");
    cmd_experiment(cfg2);
    for (const char* f : {"reports.csv", "reports.json", "delong.csv", "scores/W5L.csv"})
        CHECK(sha256_hex(read_text(cfg.out / f)) == sha256_hex(read_text(cfg2.out / f)));

    const auto model = model_from_json(nlohmann::json::parse(read_text(cfg.out / "models" / "W5L.json")));
    CHECK(model.kind == ModelKind::LRM);
}

TEST_CASE("full grid names") {
    const auto dir = testing_support::scratch_dir("grid");
    RunConfig cfg = small_config(dir);
    cfg.noise_kinds = {NoiseKind::White, NoiseKind::Environmental, NoiseKind::Demographic};
    cfg.include_mixed = true;
    cfg.train_per_class = 12;
    cfg.test_per_class = 6;
    cfg.feature_sets = {FeatureSet::SF22, FeatureSet::EWSI5};
    cfg.model_kinds = {ModelKind::GBM, ModelKind::LRM, ModelKind::KNN, ModelKind::SVM};
    cmd_experiment(cfg);
    const auto rep = lines(dir / "reports.csv");
    CHECK(rep.size() == 33);
    std::set<std::string> names;
    for (std::size_t i = 1; i < rep.size(); ++i) names.insert(rep[i].substr(0, rep[i].find(',')));
    CHECK(names.size() == 32);
    CHECK(names.count("W22G"));
    CHECK(names.count("M5S"));
}

TEST_CASE("sweep cells have 61 and 74 iterations") {
    RunConfig cfg = small_config("unused");
    const auto data = build_datasets(cfg);
    REQUIRE(data.size() == 1);
    const auto rolling = run_sweep_cell(data[0], FeatureSet::EWSI5, ModelKind::LRM, SweepKind::Rolling, {});
    CHECK(rolling.size() == 61);
    CHECK(rolling.front().x == 0);
    CHECK(rolling.back().x == 300);
    const auto expanding = run_sweep_cell(data[0], FeatureSet::EWSI5, ModelKind::LRM, SweepKind::Expanding, {});
    CHECK(expanding.size() == 74);
    CHECK(expanding.front().x == 5);
    CHECK(expanding.back().x == 370);
}

TEST_CASE("feature Mann-Whitney on a synthetic null") {
    FeatureMatrix m;
    m.set_id = FeatureSet::EWSI5;
    m.names = feature_names(FeatureSet::EWSI5);
    for (int i = 0; i < 40; ++i) {
        const std::vector<double> row = {1.0 + i % 20, 2.0 + i % 20, 3.0 + i % 20, 4.0 + i % 20, 5.0 + i % 20};
        m.rows.push_back(row);
        m.labels.push_back(i < 20 ? Label::T : Label::N);
        m.ids.push_back(std::to_string(i));
    }
    const auto rows = feature_mwu(m);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) CHECK(r.p_value > 0.99);
}

TEST_CASE("command line exit codes") {
    const auto dir = testing_support::scratch_dir("cli");
    const std::string out = (dir / "o").string();
    CHECK(run_cli("experiment --seed 1 --out " + out + " --train-per-class 0") == 2);
    CHECK(run_cli("experiment --out " + out) == 2);
    CHECK(run_cli("experiment --seed 1 --out " + out + " --noise pink") != 0);
    CHECK(run_cli("mwu-features --seed 1 --out " + out + " --input " + (dir / "missing.csv").string()) != 0);
    CHECK(run_cli("simulate --seed 3 --out " + out +
                  " --noise white --train-per-class 2 --test-per-class 1 --no-mixed") == 0);
    CHECK(fs::exists(dir / "o" / "trajectories_W.csv"));
}
