#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "adishort/report.hpp"
#include "adishort/scenario.hpp"

using namespace adishort;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& tag)
{
    const fs::path dir = fs::temp_directory_path() / ("adishort_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

scenario::Config tiny_ssh(const fs::path& out)
{
    scenario::Config cfg;
    cfg.set("scenario.kind", "ssh-transfer");
    cfg.set("model.name", "ssh");
    cfg.set("model.n_cells", "4");
    cfg.set("model.gamma", "0.3333333333333333");
    cfg.set("schedule.kind", "calibrated");
    cfg.set("schedule.T", "40");
    cfg.set("schedule.grid", "128");
    cfg.set("evolution.diagnostics_points", "101");
    cfg.set("output.dir", out.string());
    cfg.set("output.seed", "7");
    return cfg;
}

} // namespace

TEST_CASE("config file parsing with sections, comments and overrides")
{
    const fs::path dir = fresh_dir("config");
    const fs::path ini = dir / "run.ini";
    {
        std::ofstream out(ini);
        out << "# comment line\n"
            << "[model]\n"
            << "  name = ssh \n"
            << "n_cells = 6\n"
            << "; another comment\n"
            << "[schedule]\n"
            << "T = 12.5\n"
            << "[sweep]\n"
            << "grid = 1, 2.5, 7\n";
    }
    auto cfg = scenario::Config::from_file(ini.string());
    CHECK(cfg.get("model.name", "") == "ssh");
    CHECK(cfg.get_int("model.n_cells", 0) == 6);
    CHECK(cfg.get_num("schedule.T", 0.0) == doctest::Approx(12.5));
    const auto grid = cfg.get_list("sweep.grid");
    REQUIRE(grid.size() == 3);
    CHECK(grid[1] == doctest::Approx(2.5));
    // overrides win
    cfg.set("schedule.T", "99");
    CHECK(cfg.get_num("schedule.T", 0.0) == doctest::Approx(99.0));
    // malformed numbers surface as config errors
    cfg.set("schedule.T", "not-a-number");
    CHECK_THROWS_AS((void)cfg.get_num("schedule.T", 0.0), scenario::ConfigError);

    std::ofstream bad(dir / "bad.ini");
    bad << "key_without_value\n";
    bad.close();
    CHECK_THROWS_AS((void)scenario::Config::from_file((dir / "bad.ini").string()),
                    scenario::ConfigError);
}

TEST_CASE("schedule CSV round trip is bit exact")
{
    const fs::path dir = fresh_dir("roundtrip");
    const auto model =
        models::two_level_model(models::TwoLevelParams::linear_detuning({1, 0}, {1, 0}));
    const auto prof = schedule::gap_profile(model, -3.0, 3.0, 301,
                                            schedule::PairSelector::sorted_indices(0, 1));
    const auto sched = schedule::synthesize(prof, 0.17);
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    report::write_schedule_csv(a.string(), sched);
    const auto loaded = report::read_schedule_csv(a.string());
    REQUIRE(loaded.size() == sched.size());
    for (int i = 0; i < sched.size(); ++i) {
        CHECK(loaded.times[static_cast<size_t>(i)] == sched.times[static_cast<size_t>(i)]);
        CHECK(loaded.values[static_cast<size_t>(i)] == sched.values[static_cast<size_t>(i)]);
    }
    CHECK(loaded.s == sched.s);
    CHECK(loaded.kind == sched.kind);
    report::write_schedule_csv(b.string(), loaded);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("transfer scenario writes schedules, trajectories and a summary")
{
    const fs::path dir = fresh_dir("ssh_run");
    const auto cfg = tiny_ssh(dir);
    CHECK(scenario::run_ssh_transfer(cfg) == scenario::kExitOk);
    for (const char* name : {"schedule_linear.csv", "schedule_shortcut.csv",
                             "trajectory_linear.csv", "trajectory_shortcut.csv",
                             "summary.json"}) {
        CHECK(fs::exists(dir / name));
    }
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["scenario"] == "ssh-transfer");
    CHECK(summary["T"] == doctest::Approx(40.0));
    CHECK(summary["s"].get<double>() > 0.0);
    CHECK(summary["fidelity_normalized"].get<double>() > 0.0);
    CHECK(summary["shortcut"]["fidelity_site_normalized"].get<double>() > 0.0);
    CHECK(summary["seed"] == 7);
    // every CSV carries the header block
    const std::string csv = slurp(dir / "trajectory_shortcut.csv");
    CHECK(csv.find("# adishort_version") != std::string::npos);
    CHECK(csv.find("# seed = 7") != std::string::npos);
    CHECK(csv.find("# config.model.n_cells = 4") != std::string::npos);
}

TEST_CASE("identical seeds produce byte-identical outputs")
{
    const fs::path dir = fresh_dir("repro");
    auto cfg = tiny_ssh(dir);
    cfg.set("perturbation.kind", "random-disorder");
    cfg.set("perturbation.magnitude", "0.05");
    REQUIRE(scenario::run_ssh_transfer(cfg) == scenario::kExitOk);
    std::map<std::string, std::string> first;
    const std::vector<std::string> names = {"schedule_shortcut.csv", "trajectory_linear.csv",
                                            "trajectory_shortcut.csv", "summary.json"};
    for (const auto& name : names) {
        first[name] = slurp(dir / name);
    }
    REQUIRE(scenario::run_ssh_transfer(cfg) == scenario::kExitOk);
    for (const auto& name : names) {
        CHECK(first[name] == slurp(dir / name));
    }
}

TEST_CASE("zero-magnitude perturbation reproduces the clean model bit for bit")
{
    const models::SshParams p{5, 1.0, 0.25};
    scenario::Perturbation pert;
    pert.kind = scenario::Perturbation::Kind::UniformOffset;
    pert.term = "t1";
    pert.eta = 0.0;
    const auto clean = models::nh_ssh(p);
    const auto off = scenario::perturbed_ssh(p, pert);
    pert.kind = scenario::Perturbation::Kind::RandomDisorder;
    pert.seed = 99;
    const auto dis = scenario::perturbed_ssh(p, pert);
    for (double t1 : {0.0, 0.77, 2.3}) {
        const auto h0 = clean.build(t1);
        CHECK((off.build(t1) - h0).norm() == 0.0);
        CHECK((dis.build(t1) - h0).norm() == 0.0);
    }
}

TEST_CASE("validation failures exit with the configuration code")
{
    const fs::path dir = fresh_dir("badcfg");
    auto cfg = tiny_ssh(dir);
    cfg.set("schedule.T", "0");
    CHECK(scenario::run_ssh_transfer(cfg) == scenario::kExitConfig);
    auto cfg2 = tiny_ssh(dir);
    cfg2.set("perturbation.magnitude", "0.9");
    CHECK(scenario::run_ssh_transfer(cfg2) == scenario::kExitConfig);
}

TEST_CASE("numerical failures exit with the runtime code")
{
    const fs::path dir = fresh_dir("pumpfail");
    scenario::Config cfg;
    cfg.set("scenario.kind", "pump");
    cfg.set("model.name", "pump");
    cfg.set("model.n_cells", "4");
    cfg.set("model.delta0", "0"); // the gap closes during the cycle
    cfg.set("schedule.T", "5");
    cfg.set("schedule.grid", "128");
    cfg.set("output.dir", dir.string());
    CHECK(scenario::run_pump(cfg) == scenario::kExitNumerical);
}

TEST_CASE("pump scenario reports the invariants")
{
    const fs::path dir = fresh_dir("pump_run");
    scenario::Config cfg;
    cfg.set("scenario.kind", "pump");
    cfg.set("model.name", "pump");
    cfg.set("model.n_cells", "4");
    cfg.set("model.delta0", "0.6");
    cfg.set("model.Delta0", "0.36");
    cfg.set("schedule.kind", "calibrated");
    cfg.set("schedule.T", "8");
    cfg.set("schedule.grid", "256");
    cfg.set("evolution.diagnostics_points", "101");
    cfg.set("topology.n_k", "48");
    cfg.set("topology.n_phi", "48");
    cfg.set("output.dir", dir.string());
    CHECK(scenario::run_pump(cfg) == scenario::kExitOk);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["chern"] == 1);
    CHECK(summary["pumped_charge"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(summary["gap_min"].get<double>() == doctest::Approx(0.72).epsilon(1e-2));
    CHECK(fs::exists(dir / "berry_curvature.csv"));
}

TEST_CASE("sweep over total time emits one row per point per schedule")
{
    const fs::path dir = fresh_dir("sweep_run");
    scenario::Config cfg;
    cfg.set("scenario.kind", "sweep");
    cfg.set("model.name", "ssh");
    cfg.set("model.n_cells", "4");
    cfg.set("schedule.grid", "128");
    cfg.set("sweep.axis", "total_time");
    cfg.set("sweep.grid", "10, 20");
    cfg.set("evolution.diagnostics_points", "51");
    cfg.set("output.dir", dir.string());
    cfg.set("output.workers", "2");
    CHECK(scenario::run_sweep(cfg) == scenario::kExitOk);
    const std::string csv = slurp(dir / "sweep.csv");
    int rows = 0;
    std::istringstream lines(csv);
    std::string line;
    bool past_header = false;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!past_header) {
            past_header = true;
            CHECK(line == "axis,value,schedule,fidelity_normalized,fidelity_raw,"
                          "s_prime_max,note");
            continue;
        }
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("spectrum scenario tabulates every level over the control grid")
{
    const fs::path dir = fresh_dir("spectrum_run");
    scenario::Config cfg;
    cfg.set("scenario.kind", "spectrum");
    cfg.set("model.name", "ssh");
    cfg.set("model.n_cells", "3");
    cfg.set("spectrum.grid", "11");
    cfg.set("output.dir", dir.string());
    CHECK(scenario::run_spectrum(cfg) == scenario::kExitOk);
    const std::string csv = slurp(dir / "spectrum.csv");
    int rows = 0;
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#' && line.find("R,") != 0) {
            ++rows;
        }
    }
    CHECK(rows == 11 * 5);
}

TEST_CASE("schedule-only scenario works for the two-level model")
{
    const fs::path dir = fresh_dir("schedule_run");
    scenario::Config cfg;
    cfg.set("scenario.kind", "schedule");
    cfg.set("model.name", "two-level");
    cfg.set("schedule.kind", "shortcut");
    cfg.set("schedule.s", "0.25");
    cfg.set("schedule.grid", "256");
    cfg.set("output.dir", dir.string());
    CHECK(scenario::run_schedule_only(cfg) == scenario::kExitOk);
    const auto sched = report::read_schedule_csv((dir / "schedule_shortcut.csv").string());
    CHECK(sched.kind == schedule::ScheduleKind::Shortcut);
    CHECK(sched.s == 0.25);
    CHECK(sched.times.size() == 256);
}
