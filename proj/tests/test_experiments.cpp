#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "excsim/csv.hpp"
#include "excsim/experiments.hpp"

using namespace excsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("excsim_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig make_cfg(const std::string& experiment, const fs::path& out,
                          const std::string& extra = "") {
    auto kv = KeyValueConfig::parse_string("experiment = " + experiment + "\n" + extra);
    kv.set("output_dir", out.string());
    return ExperimentConfig::from_config(kv);
}

} // namespace

TEST_CASE("trace CSV round trip") {
    const auto dir = fresh_dir("csv");
    std::vector<TimeTrace> traces(2);
    traces[0].t_start = 0.0;
    traces[0].bin_width = 0.025;
    traces[0].channel = "D";
    traces[1] = traces[0];
    traces[1].channel = "A";
    for (int i = 0; i < 40; ++i) {
        traces[0].value.push_back(0.5 + 0.3 * std::sin(0.2 * i));
        traces[0].valid.push_back(1);
        traces[1].value.push_back(1.0 / (i + 1.0));
        traces[1].valid.push_back(i == 7 ? 0 : 1); // invalid bins are skipped
    }
    const auto path = (dir / "t.csv").string();
    write_traces_csv(path, traces);

    const std::string text = slurp(path);
    CHECK(text.rfind("t_ns,channel_name,value", 0) == 0);

    const auto back = read_traces_csv(path);
    REQUIRE(back.size() == 2);
    for (const auto& tr : back) {
        if (tr.channel == "D") {
            REQUIRE(tr.size() == 40);
            for (int i = 0; i < 40; ++i) {
                CHECK(tr.value[i] == doctest::Approx(traces[0].value[i]).epsilon(1e-10));
                CHECK(tr.bin_center(i) == doctest::Approx(traces[0].bin_center(i)).epsilon(1e-10));
            }
        } else {
            CHECK(tr.channel == "A");
            CHECK(tr.size() == 39); // the invalid bin never hits the file
        }
    }
}

TEST_CASE("trajectory CSV round trip") {
    const auto dir = fresh_dir("traj");
    DeviceParams dev;
    PulseProfile flat;
    flat.baseline_field = -175.0;
    const auto tg = bin_centers(1.0, 0.1);
    const auto traj = propagate(encode_exciton(pol::D()), flat, dev, build_noise(dev), tg);
    const auto path = (dir / "traj.csv").string();
    write_trajectory_csv(path, traj);
    const auto back = read_trajectory_csv(path);
    REQUIRE(back.t.size() == traj.t.size());
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        CHECK(back.t[k] == doctest::Approx(traj.t[k]).epsilon(1e-10));
        CHECK((back.rho[k] - traj.rho[k]).norm() < 1e-9);
    }
}

TEST_CASE("sweep experiment writes the model table and passes") {
    const auto dir = fresh_dir("sweep");
    const auto outcome = run_experiment(make_cfg("sweep", dir));
    CHECK(outcome.pass);
    CHECK(outcome.message == "[PASS] sweep");
    CHECK(fs::exists(dir / "sweep_model.csv"));

    const auto j = nlohmann::json::parse(slurp(outcome.summary_path));
    CHECK(j["experiment"] == "sweep");
    CHECK(j["pass"] == true);
    CHECK(j["max_identity_err_ueV2"].get<double>() < 1e-9);

    const std::string table = slurp(dir / "sweep_model.csv");
    CHECK(table.rfind("field_kV_cm,bias_V,detuning_ueV,splitting_ueV,angle_deg", 0) == 0);
}

TEST_CASE("fig1d experiment recovers the splittings it simulates") {
    const auto dir = fresh_dir("fig1d");
    const auto outcome = run_experiment(make_cfg("fig1d", dir));
    CHECK(outcome.pass);
    for (int i = 1; i <= 3; ++i)
        CHECK(fs::exists(dir / ("fig1d_D_" + std::to_string(i) + ".csv")));

    const auto j = nlohmann::json::parse(slurp(outcome.summary_path));
    REQUIRE(j["traces"].size() == 3);
    for (const auto& row : j["traces"]) CHECK(row["rel_err"].get<double>() < 0.01);
    CHECK(j["traces"][1]["s_model_ueV"].get<double>() == doctest::Approx(5.0));
}

TEST_CASE("experiment output is deterministic per seed") {
    const std::string extra =
        "detection.poisson_enabled = true\n"
        "detection.photon_budget = 100000\n"
        "seed = 7\n";
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    run_experiment(make_cfg("fig1d", dir_a, extra));
    run_experiment(make_cfg("fig1d", dir_b, extra));
    CHECK(slurp(dir_a / "fig1d_D_1.csv") == slurp(dir_b / "fig1d_D_1.csv"));
    CHECK(slurp(dir_a / "fig1d_D_3.csv") == slurp(dir_b / "fig1d_D_3.csv"));

    const auto dir_c = fresh_dir("det_c");
    run_experiment(make_cfg(
        "fig1d", dir_c,
        "detection.poisson_enabled = true\ndetection.photon_budget = 100000\nseed = 8\n"));
    CHECK(slurp(dir_a / "fig1d_D_1.csv") != slurp(dir_c / "fig1d_D_1.csv"));
}
