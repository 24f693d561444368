#include "adishort/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "adishort/report.hpp"
#include "adishort/topology.hpp"

namespace adishort::scenario {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using report::g17;

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Deterministic symmetric uniform draw in [-1, 1], independent of platform
// library details.
class SymmetricUniform {
public:
    explicit SymmetricUniform(std::uint64_t seed) : engine_(seed) {}
    double next()
    {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return 2.0 * u - 1.0;
    }

private:
    std::mt19937_64 engine_;
};

void parallel_for(int n, int workers, const std::function<void(int)>& body)
{
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
    }
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

report::HeaderBlock config_header(const Config& cfg)
{
    report::HeaderBlock header;
    header.emplace_back("seed", std::to_string(cfg.get_seed()));
    for (const auto& [key, value] : cfg.entries()) {
        header.emplace_back("config." + key, value);
    }
    return header;
}

json config_echo(const Config& cfg)
{
    json echo = json::object();
    for (const auto& [key, value] : cfg.entries()) {
        echo[key] = value;
    }
    return echo;
}

models::SshParams ssh_params_from(const Config& cfg)
{
    models::SshParams p;
    p.n_cells = cfg.get_int("model.n_cells", 20);
    p.t2 = cfg.get_num("model.t2", 1.0);
    p.gamma = cfg.get_num("model.gamma", 1.0 / 3.0);
    if (p.n_cells < 2) {
        throw ConfigError("model.n_cells must be at least 2");
    }
    return p;
}

models::RiceMeleParams pump_params_from(const Config& cfg)
{
    models::RiceMeleParams p;
    p.n_cells = cfg.get_int("model.n_cells", 10);
    p.t0 = cfg.get_num("model.t0", 1.0);
    p.delta0 = cfg.get_num("model.delta0", 0.6);
    p.big_delta0 = cfg.get_num("model.Delta0", 0.36);
    p.boundary = cfg.get("model.boundary", "periodic") == "open"
                     ? models::Boundary::Open
                     : models::Boundary::Periodic;
    if (p.n_cells < 2) {
        throw ConfigError("model.n_cells must be at least 2");
    }
    return p;
}

models::TwoLevelParams two_level_params_from(const Config& cfg)
{
    models::TwoLevelParams p = models::TwoLevelParams::linear_detuning(
        {cfg.get_num("model.omega0_re", 1.0), cfg.get_num("model.omega0_im", 0.0)},
        {cfg.get_num("model.omega0p_re", 1.0), cfg.get_num("model.omega0p_im", 0.0)});
    return p;
}

schedule::ImagGapSign imag_sign_from(const Config& cfg)
{
    const std::string v = cfg.get("schedule.imag_sign", "as-tracked");
    if (v == "as-tracked") {
        return schedule::ImagGapSign::AsTracked;
    }
    if (v == "flipped") {
        return schedule::ImagGapSign::Flipped;
    }
    throw ConfigError("schedule.imag_sign must be 'as-tracked' or 'flipped'");
}

struct ModelBundle {
    std::string name;            // ssh | pump | two-level
    models::DrivenModel nominal; // schedule design target
    models::DrivenModel evolved; // with the configured perturbation
    schedule::PairSelector selector;
    double r_start = 0.0;
    double r_end = 0.0;
};

ModelBundle model_bundle_from(const Config& cfg, const Perturbation& pert)
{
    ModelBundle b;
    b.name = cfg.get("model.name", "ssh");
    if (b.name == "ssh") {
        const models::SshParams p = ssh_params_from(cfg);
        b.nominal = models::nh_ssh(p);
        b.evolved = perturbed_ssh(p, pert);
        b.selector = schedule::PairSelector::zero_nearest();
        b.r_start = cfg.get_num("model.r_start", 0.0);
        b.r_end = cfg.get_num("model.r_end", 3.0);
    } else if (b.name == "pump") {
        const models::RiceMeleParams p = pump_params_from(cfg);
        b.nominal = models::rice_mele(p);
        b.evolved = perturbed_rice_mele(p, pert);
        b.selector = schedule::PairSelector::half_filling(p.sites());
        b.r_start = cfg.get_num("model.r_start", 0.0);
        b.r_end = cfg.get_num("model.r_end", 2.0 * kPi);
    } else if (b.name == "two-level") {
        const models::TwoLevelParams p = two_level_params_from(cfg);
        b.nominal = models::two_level_model(p);
        b.evolved = b.nominal;
        b.selector = schedule::PairSelector::sorted_indices(0, 1);
        b.r_start = cfg.get_num("model.r_start", -3.0);
        b.r_end = cfg.get_num("model.r_end", 3.0);
    } else {
        throw ConfigError("model.name must be ssh, pump or two-level");
    }
    if (!(b.r_end > b.r_start)) {
        throw ConfigError("model.r_end must exceed model.r_start");
    }
    return b;
}

struct SchedulePair {
    schedule::Schedule linear;
    schedule::Schedule shortcut;
    double s = 0.0;
    double total_time = 0.0;
};

// Builds the matched pair: a shortcut per the configured kind plus a linear
// ramp of the same duration.
SchedulePair schedules_from(const Config& cfg, const schedule::GapProfile& profile,
                            double r_start, double r_end)
{
    const std::string kind = cfg.get("schedule.kind", "calibrated");
    const int grid = profile.size();
    SchedulePair out;
    if (kind == "linear") {
        const double t = cfg.get_num("schedule.T", 0.0);
        if (!(t > 0.0)) {
            throw ConfigError("schedule.T must be positive");
        }
        out.linear = schedule::linear(r_start, r_end, t, grid - 1);
        out.shortcut = schedule::calibrate(profile, t).schedule;
        out.s = out.shortcut.s;
        out.total_time = t;
    } else if (kind == "shortcut") {
        const double s = cfg.get_num("schedule.s", 0.0);
        if (!(s > 0.0)) {
            throw ConfigError("schedule.s must be positive");
        }
        out.shortcut = schedule::synthesize(profile, s);
        out.s = s;
        out.total_time = out.shortcut.total_time;
        out.linear = schedule::linear(r_start, r_end, out.total_time, grid - 1);
    } else if (kind == "calibrated") {
        const double t = cfg.get_num("schedule.T", 0.0);
        if (!(t > 0.0)) {
            throw ConfigError("schedule.T must be positive");
        }
        const auto cal = schedule::calibrate(profile, t);
        out.shortcut = cal.schedule;
        out.s = cal.s;
        out.total_time = t;
        out.linear = schedule::linear(r_start, r_end, t, grid - 1);
    } else {
        throw ConfigError("schedule.kind must be linear, shortcut or calibrated");
    }
    return out;
}

int evolution_steps(const Config& cfg, const schedule::Schedule& sched)
{
    const int requested = cfg.get_int("evolution.steps", 0);
    const int minimum = 10 * std::max(1, sched.size() - 1);
    return std::max(requested, minimum);
}

std::vector<std::vector<std::string>> trajectory_rows(const dynamics::Trajectory& traj)
{
    std::vector<std::vector<std::string>> rows;
    rows.reserve(traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        rows.push_back({
            g17(traj.times[i]),
            g17(traj.norms[i]),
            g17(i < traj.fidelity_normalized.size() ? traj.fidelity_normalized[i] : 0.0),
            g17(i < traj.fidelity_raw.size() ? traj.fidelity_raw[i] : 0.0),
            g17(i < traj.s_prime.size() ? traj.s_prime[i] : 0.0),
        });
    }
    return rows;
}

void write_trajectory(const std::string& path, const dynamics::Trajectory& traj,
                      const report::HeaderBlock& header)
{
    report::write_csv(path, header,
                      {"time", "norm", "fidelity_normalized", "fidelity_raw", "s_prime"},
                      trajectory_rows(traj));
}

void write_summary(const std::string& path, const json& summary)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path);
    }
    out << summary.dump(2) << "\n";
}

fs::path ensure_out_dir(const Config& cfg)
{
    const fs::path dir = cfg.get("output.dir", "out");
    fs::create_directories(dir);
    return dir;
}

int guarded(const std::string& scenario, const std::function<void()>& body)
{
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << scenario << ": configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << scenario << ": " << e.what() << "\n";
        return kExitNumerical;
    }
}

void validate_common(const Config& cfg)
{
    const double eta = cfg.get_num("perturbation.magnitude", 0.0);
    if (std::abs(eta) > 0.5) {
        throw ConfigError("perturbation.magnitude must lie in [-0.5, 0.5]");
    }
    if (cfg.get_int("schedule.grid", 2000) < 64) {
        throw ConfigError("schedule.grid must be at least 64");
    }
}

} // namespace

Config Config::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    Config cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') {
            continue;
        }
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected key = value";
            throw ConfigError(msg.str());
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": empty key";
            throw ConfigError(msg.str());
        }
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key, double fallback) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        return fallback;
    }
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
        throw ConfigError("expected a number for " + key + ", got '" + it->second + "'");
    }
    return v;
}

int Config::get_int(const std::string& key, int fallback) const
{
    const double v = get_num(key, fallback);
    if (v != std::floor(v)) {
        throw ConfigError("expected an integer for " + key);
    }
    return static_cast<int>(v);
}

std::uint64_t Config::get_seed() const
{
    return static_cast<std::uint64_t>(get_num("output.seed", 1.0));
}

std::vector<double> Config::get_list(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        return {};
    }
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') {
            throw ConfigError("expected a comma-separated number list for " + key);
        }
        out.push_back(v);
    }
    return out;
}

Perturbation perturbation_from(const Config& cfg)
{
    Perturbation p;
    const std::string kind = cfg.get("perturbation.kind", "none");
    if (kind == "none") {
        p.kind = Perturbation::Kind::None;
    } else if (kind == "uniform-offset") {
        p.kind = Perturbation::Kind::UniformOffset;
    } else if (kind == "random-disorder") {
        p.kind = Perturbation::Kind::RandomDisorder;
    } else {
        throw ConfigError("perturbation.kind must be none, uniform-offset or random-disorder");
    }
    p.term = cfg.get("perturbation.term", "t1");
    p.eta = cfg.get_num("perturbation.magnitude", 0.0);
    p.seed = cfg.get_seed();
    return p;
}

models::DrivenModel perturbed_ssh(const models::SshParams& p, const Perturbation& spec)
{
    if (spec.kind == Perturbation::Kind::None) {
        return models::nh_ssh(p);
    }
    if (spec.term != "t1" && spec.term != "t2" && spec.term != "gamma") {
        throw ConfigError("perturbation.term for ssh must be t1, t2 or gamma");
    }
    const int n = p.sites();
    const int intra_bonds = p.n_cells;
    const int inter_bonds = p.n_cells - 1;

    std::vector<double> f_intra(static_cast<size_t>(intra_bonds), 1.0);
    std::vector<double> f_inter(static_cast<size_t>(inter_bonds), 1.0);
    if (spec.kind == Perturbation::Kind::UniformOffset) {
        auto& target = spec.term == "t2" ? f_inter : f_intra;
        std::fill(target.begin(), target.end(), 1.0 + spec.eta);
    } else if (spec.kind == Perturbation::Kind::RandomDisorder) {
        SymmetricUniform rng(spec.seed);
        auto& target = spec.term == "t2" ? f_inter : f_intra;
        for (double& f : target) {
            f = 1.0 + spec.eta * rng.next();
        }
    }

    models::DrivenModel m;
    m.dim = n;
    m.control_name = "t1";
    m.static_params["n_cells"] = p.n_cells;
    m.static_params["t2"] = p.t2;
    m.static_params["gamma"] = p.gamma;
    m.static_params["perturbation_eta"] = spec.eta;
    const std::string term = spec.term;
    m.build = [p, n, f_intra, f_inter, term](double t1) {
        models::Matrix h = models::Matrix::Zero(n, n);
        for (int cell = 0; cell < p.n_cells; ++cell) {
            const int a = 2 * cell;
            const int b = 2 * cell + 1;
            if (b < n) {
                const double f = f_intra[static_cast<size_t>(cell)];
                const double t1_eff = term == "t1" ? t1 * f : t1;
                const double gamma_eff = term == "gamma" ? p.gamma * f : p.gamma;
                h(a, b) = models::Complex(t1_eff + 0.5 * gamma_eff, 0.0);
                h(b, a) = models::Complex(t1_eff - 0.5 * gamma_eff, 0.0);
            }
            const int a_next = 2 * (cell + 1);
            if (b < n && a_next < n) {
                const double t2_eff =
                    term == "t2" ? p.t2 * f_inter[static_cast<size_t>(cell)] : p.t2;
                h(b, a_next) = models::Complex(t2_eff, 0.0);
                h(a_next, b) = models::Complex(t2_eff, 0.0);
            }
        }
        return h;
    };
    return m;
}

models::DrivenModel perturbed_rice_mele(const models::RiceMeleParams& p,
                                        const Perturbation& spec)
{
    if (spec.kind == Perturbation::Kind::None) {
        return models::rice_mele(p);
    }
    if (spec.term != "t0" && spec.term != "delta0" && spec.term != "Delta0") {
        throw ConfigError("perturbation.term for pump must be t0, delta0 or Delta0");
    }

    if (spec.kind == Perturbation::Kind::UniformOffset) {
        models::RiceMeleParams q = p;
        if (spec.term == "t0") {
            q.t0 *= 1.0 + spec.eta;
        } else if (spec.term == "delta0") {
            q.delta0 *= 1.0 + spec.eta;
        } else {
            q.big_delta0 *= 1.0 + spec.eta;
        }
        models::DrivenModel m = models::rice_mele(q);
        m.static_params["perturbation_eta"] = spec.eta;
        return m;
    }

    // Random disorder: bond-wise factors on all hoppings (term t0), on the
    // alternating part (delta0), or site-wise factors on the staggered
    // potential (Delta0).
    const int n = p.sites();
    const int bonds = p.boundary == models::Boundary::Periodic ? n : n - 1;
    SymmetricUniform rng(spec.seed);
    std::vector<double> factor;
    if (spec.term == "Delta0") {
        factor.resize(static_cast<size_t>(n));
    } else {
        factor.resize(static_cast<size_t>(bonds));
    }
    for (double& f : factor) {
        f = 1.0 + spec.eta * rng.next();
    }

    models::DrivenModel m;
    m.dim = n;
    m.control_name = "phi";
    m.static_params["perturbation_eta"] = spec.eta;
    const std::string term = spec.term;
    m.build = [p, n, factor, term](double phi) {
        const double t1 = p.t1(phi);
        const double t2 = p.t2(phi);
        const double dphi = p.delta0 * std::cos(phi);
        const double onsite = p.onsite(phi);
        models::Matrix h = models::Matrix::Zero(n, n);
        const auto intra = [&](int bond) {
            if (term == "t0") {
                return t1 * factor[static_cast<size_t>(bond)];
            }
            if (term == "delta0") {
                return p.t0 + dphi * factor[static_cast<size_t>(bond)];
            }
            return t1;
        };
        const auto inter = [&](int bond) {
            if (term == "t0") {
                return t2 * factor[static_cast<size_t>(bond)];
            }
            if (term == "delta0") {
                return p.t0 - dphi * factor[static_cast<size_t>(bond)];
            }
            return t2;
        };
        for (int cell = 0; cell < p.n_cells; ++cell) {
            const int a = 2 * cell;
            const int b = 2 * cell + 1;
            const double fa = term == "Delta0" ? factor[static_cast<size_t>(a)] : 1.0;
            const double fb = term == "Delta0" ? factor[static_cast<size_t>(b)] : 1.0;
            h(a, a) = models::Complex(onsite * fa, 0.0);
            h(b, b) = models::Complex(-onsite * fb, 0.0);
            h(a, b) = models::Complex(intra(2 * cell), 0.0);
            h(b, a) = h(a, b);
            const int a_next = 2 * (cell + 1);
            if (a_next < n) {
                h(b, a_next) = models::Complex(inter(2 * cell + 1), 0.0);
                h(a_next, b) = h(b, a_next);
            }
        }
        if (p.boundary == models::Boundary::Periodic) {
            h(n - 1, 0) += models::Complex(inter(n - 1), 0.0);
            h(0, n - 1) += models::Complex(inter(n - 1), 0.0);
        }
        return h;
    };
    return m;
}

Vector bloch_state_on_chain(const models::RiceMeleParams& p, double k, double phi)
{
    const Vector u = topology::occupied_state(p, k, phi);
    const int cells = p.n_cells;
    Vector psi = Vector::Zero(2 * cells);
    const double norm = 1.0 / std::sqrt(static_cast<double>(cells));
    for (int j = 0; j < cells; ++j) {
        const models::Complex phase = std::exp(models::Complex(0.0, k * j)) * norm;
        psi(2 * j) = phase * u(0);
        psi(2 * j + 1) = phase * u(1);
    }
    return psi;
}

models::DrivenModel bloch_sector_model(const models::RiceMeleParams& p, double k)
{
    models::DrivenModel m;
    m.dim = 2;
    m.control_name = "phi";
    m.static_params["k"] = k;
    m.build = [p, k](double phi) { return topology::bloch_hamiltonian(p, k, phi); };
    return m;
}

namespace {

struct ScheduleRun {
    std::string label;
    dynamics::Trajectory trajectory;
    dynamics::DiagnosticsSeries diag_element;
    dynamics::DiagnosticsSeries diag_spectral;
    double fidelity_normalized = 0.0;
    double fidelity_raw = 0.0;
};

// Evolves one schedule on the (possibly perturbed) system and evaluates the
// adiabatic diagnostics on the diagnostics model.
ScheduleRun run_one(const Config& cfg, const models::DrivenModel& evolved,
                    const models::DrivenModel& diag_model,
                    const schedule::PairSelector& diag_selector,
                    const schedule::Schedule& sched, const Vector& psi0,
                    const Vector& target, const std::string& label)
{
    ScheduleRun run;
    run.label = label;
    const int steps = evolution_steps(cfg, sched);
    dynamics::EvolveOptions opt;
    opt.target = target;
    opt.store_stride = std::max(1, steps / std::max(1, cfg.get_int("evolution.samples", 1000)));
    run.trajectory = dynamics::evolve(evolved, sched, psi0, steps, opt);

    const int diag_points = cfg.get_int("evolution.diagnostics_points", 1001);
    const auto sign = imag_sign_from(cfg);
    run.diag_element = dynamics::adiabatic_diagnostics(
        diag_model, sched, diag_selector, diag_points,
        dynamics::DiagnosticsForm::MatrixElement, sign);
    run.diag_spectral = dynamics::adiabatic_diagnostics(
        diag_model, sched, diag_selector, diag_points,
        dynamics::DiagnosticsForm::Spectral, sign);
    dynamics::attach_diagnostics(run.trajectory, run.diag_element);

    run.fidelity_normalized = run.trajectory.fidelity_normalized.back();
    run.fidelity_raw = run.trajectory.fidelity_raw.back();
    return run;
}

json run_to_json(const ScheduleRun& run)
{
    json j;
    j["fidelity_normalized"] = run.fidelity_normalized;
    j["fidelity_raw"] = run.fidelity_raw;
    j["s_prime_max_matrix_element"] = run.diag_element.max_certified;
    j["s_prime_max_matrix_element_all"] = run.diag_element.max_value;
    j["s_prime_max_spectral"] = run.diag_spectral.max_value;
    return j;
}

} // namespace

int run_ssh_transfer(const Config& cfg)
{
    return guarded("ssh-transfer", [&]() {
        validate_common(cfg);
        const Perturbation pert = perturbation_from(cfg);
        const models::SshParams p = ssh_params_from(cfg);
        const double r0 = cfg.get_num("model.r_start", 0.0);
        const double r1 = cfg.get_num("model.r_end", 3.0);
        const int grid = cfg.get_int("schedule.grid", 2000);

        const models::DrivenModel nominal = models::nh_ssh(p);
        const auto profile = schedule::gap_profile(
            nominal, r0, r1, grid, schedule::PairSelector::zero_nearest(),
            imag_sign_from(cfg));
        const SchedulePair pair = schedules_from(cfg, profile, r0, r1);

        const models::DrivenModel evolved = perturbed_ssh(p, pert);
        const Vector psi0 = models::edge_target(p, models::Side::Left);
        const Vector site_target = models::edge_target(p, models::Side::Right);
        // The exact zero mode at the endpoint is the adiabatic target; the
        // bare end-site overlap is reported alongside it.
        const Vector target = models::zero_mode_state(p, r1);

        const auto selector = schedule::PairSelector::zero_nearest();
        const ScheduleRun lin = run_one(cfg, evolved, nominal, selector, pair.linear,
                                        psi0, target, "linear");
        const ScheduleRun sc = run_one(cfg, evolved, nominal, selector, pair.shortcut,
                                       psi0, target, "shortcut");
        const dynamics::Fidelity lin_site =
            dynamics::fidelity(lin.trajectory.states.back(), site_target);
        const dynamics::Fidelity sc_site =
            dynamics::fidelity(sc.trajectory.states.back(), site_target);

        const fs::path dir = ensure_out_dir(cfg);
        const auto header = config_header(cfg);
        report::write_schedule_csv((dir / "schedule_linear.csv").string(), pair.linear,
                                   header);
        report::write_schedule_csv((dir / "schedule_shortcut.csv").string(),
                                   pair.shortcut, header);
        write_trajectory((dir / "trajectory_linear.csv").string(), lin.trajectory,
                         header);
        write_trajectory((dir / "trajectory_shortcut.csv").string(), sc.trajectory,
                         header);

        json summary;
        summary["scenario"] = "ssh-transfer";
        summary["version"] = report::version();
        summary["seed"] = cfg.get_seed();
        summary["T"] = pair.total_time;
        summary["s"] = pair.s;
        summary["gap_min"] = profile.gap_min;
        summary["fidelity_normalized"] = sc.fidelity_normalized;
        summary["fidelity_raw"] = sc.fidelity_raw;
        summary["s_prime_max"] = sc.diag_element.max_certified;
        json sc_json = run_to_json(sc);
        sc_json["fidelity_site_normalized"] = sc_site.normalized;
        sc_json["fidelity_site_raw"] = sc_site.raw;
        json lin_json = run_to_json(lin);
        lin_json["fidelity_site_normalized"] = lin_site.normalized;
        lin_json["fidelity_site_raw"] = lin_site.raw;
        summary["shortcut"] = sc_json;
        summary["linear"] = lin_json;
        summary["config"] = config_echo(cfg);
        write_summary((dir / "summary.json").string(), summary);
    });
}

int run_pump(const Config& cfg)
{
    return guarded("pump", [&]() {
        validate_common(cfg);
        const Perturbation pert = perturbation_from(cfg);
        const models::RiceMeleParams p = pump_params_from(cfg);
        if (p.n_cells % 2 != 0) {
            throw ConfigError(
                "pump dynamics tracks the k = pi mode; model.n_cells must be even");
        }
        if (p.boundary != models::Boundary::Periodic) {
            throw ConfigError("pump dynamics requires periodic boundary");
        }
        const double r0 = cfg.get_num("model.r_start", 0.0);
        const double r1 = cfg.get_num("model.r_end", 2.0 * kPi);
        const int grid = cfg.get_int("schedule.grid", 2000);

        const models::DrivenModel nominal = models::rice_mele(p);
        const auto profile = schedule::gap_profile(
            nominal, r0, r1, grid, schedule::PairSelector::half_filling(p.sites()),
            imag_sign_from(cfg));
        const SchedulePair pair = schedules_from(cfg, profile, r0, r1);

        const models::DrivenModel evolved = perturbed_rice_mele(p, pert);
        const Vector psi0 = bloch_state_on_chain(p, kPi, r0);
        const Vector target = bloch_state_on_chain(p, kPi, r1);

        // Diagnostics run in the conserved k = pi sector, where the tracked
        // pair is the full story and never degenerates with spectator bands.
        const models::DrivenModel sector = bloch_sector_model(p, kPi);
        const auto selector = schedule::PairSelector::sorted_indices(0, 1);
        const ScheduleRun lin =
            run_one(cfg, evolved, sector, selector, pair.linear, psi0, target, "linear");
        const ScheduleRun sc = run_one(cfg, evolved, sector, selector, pair.shortcut,
                                       psi0, target, "shortcut");

        const topology::BlochGrid tgrid{cfg.get_int("topology.n_k", 64),
                                        cfg.get_int("topology.n_phi", 64), 0};
        const int chern = topology::chern_number(p, tgrid);
        const double charge = topology::pumped_charge(p, tgrid.n_phi, tgrid.n_k);

        const fs::path dir = ensure_out_dir(cfg);
        const auto header = config_header(cfg);
        report::write_schedule_csv((dir / "schedule_linear.csv").string(), pair.linear,
                                   header);
        report::write_schedule_csv((dir / "schedule_shortcut.csv").string(),
                                   pair.shortcut, header);
        write_trajectory((dir / "trajectory_linear.csv").string(), lin.trajectory,
                         header);
        write_trajectory((dir / "trajectory_shortcut.csv").string(), sc.trajectory,
                         header);

        const auto field = topology::berry_curvature(p, tgrid);
        std::vector<std::vector<std::string>> rows;
        rows.reserve(field.k.size());
        for (size_t i = 0; i < field.k.size(); ++i) {
            rows.push_back({g17(field.k[i]), g17(field.phi[i]), g17(field.f[i])});
        }
        report::write_csv((dir / "berry_curvature.csv").string(), header,
                          {"k", "phi", "F"}, rows);

        json summary;
        summary["scenario"] = "pump";
        summary["version"] = report::version();
        summary["seed"] = cfg.get_seed();
        summary["T"] = pair.total_time;
        summary["s"] = pair.s;
        summary["gap_min"] = profile.gap_min;
        summary["chern"] = chern;
        summary["pumped_charge"] = charge;
        summary["fidelity_normalized"] = sc.fidelity_normalized;
        summary["fidelity_raw"] = sc.fidelity_raw;
        summary["s_prime_max"] = sc.diag_element.max_certified;
        summary["shortcut"] = run_to_json(sc);
        summary["linear"] = run_to_json(lin);
        summary["config"] = config_echo(cfg);
        write_summary((dir / "summary.json").string(), summary);
    });
}

int run_schedule_only(const Config& cfg)
{
    return guarded("schedule", [&]() {
        validate_common(cfg);
        const ModelBundle b = model_bundle_from(cfg, Perturbation{});
        const int grid = cfg.get_int("schedule.grid", 2000);
        const auto profile = schedule::gap_profile(b.nominal, b.r_start, b.r_end, grid,
                                                   b.selector, imag_sign_from(cfg));
        const SchedulePair pair = schedules_from(cfg, profile, b.r_start, b.r_end);

        const fs::path dir = ensure_out_dir(cfg);
        const auto header = config_header(cfg);
        report::write_schedule_csv((dir / "schedule_linear.csv").string(), pair.linear,
                                   header);
        report::write_schedule_csv((dir / "schedule_shortcut.csv").string(),
                                   pair.shortcut, header);

        json summary;
        summary["scenario"] = "schedule";
        summary["version"] = report::version();
        summary["seed"] = cfg.get_seed();
        summary["T"] = pair.total_time;
        summary["s"] = pair.s;
        summary["gap_min"] = profile.gap_min;
        summary["zero_cost"] = pair.shortcut.zero_cost;
        summary["config"] = config_echo(cfg);
        write_summary((dir / "summary.json").string(), summary);
    });
}

int run_spectrum(const Config& cfg)
{
    return guarded("spectrum", [&]() {
        validate_common(cfg);
        const ModelBundle b = model_bundle_from(cfg, Perturbation{});
        const int grid = cfg.get_int("spectrum.grid", 401);
        if (grid < 2) {
            throw ConfigError("spectrum.grid must be at least 2");
        }

        std::vector<std::vector<std::string>> rows;
        for (int m = 0; m < grid; ++m) {
            const double r = b.r_start + (b.r_end - b.r_start) * m / (grid - 1);
            const auto sys = spectral::eig_dense(b.nominal.build(r));
            for (int i = 0; i < sys.dim(); ++i) {
                rows.push_back({g17(r), std::to_string(i), g17(sys.values(i).real()),
                                g17(sys.values(i).imag()), g17(std::abs(sys.values(i)))});
            }
        }
        const fs::path dir = ensure_out_dir(cfg);
        report::write_csv((dir / "spectrum.csv").string(), config_header(cfg),
                          {"R", "level", "re", "im", "abs"}, rows);
    });
}

int run_sweep(const Config& cfg)
{
    return guarded("sweep", [&]() {
        validate_common(cfg);
        const std::string axis = cfg.get("sweep.axis", "total_time");
        if (axis != "total_time" && axis != "perturbation") {
            throw ConfigError("sweep.axis must be total_time or perturbation");
        }
        const std::vector<double> grid_values = cfg.get_list("sweep.grid");
        if (grid_values.empty()) {
            throw ConfigError("sweep.grid must be a nonempty ascending list");
        }
        for (size_t i = 0; i + 1 < grid_values.size(); ++i) {
            if (!(grid_values[i] < grid_values[i + 1])) {
                throw ConfigError("sweep.grid must be strictly ascending");
            }
        }

        Perturbation base_pert = perturbation_from(cfg);
        const ModelBundle base = model_bundle_from(cfg, base_pert);
        const int grid = cfg.get_int("schedule.grid", 2000);
        const auto profile = schedule::gap_profile(base.nominal, base.r_start, base.r_end,
                                                   grid, base.selector, imag_sign_from(cfg));

        const bool is_pump = base.name == "pump";
        models::RiceMeleParams pump_params;
        models::SshParams ssh_params;
        if (is_pump) {
            pump_params = pump_params_from(cfg);
            if (pump_params.n_cells % 2 != 0) {
                throw ConfigError("pump sweeps need even model.n_cells");
            }
        } else if (base.name == "ssh") {
            ssh_params = ssh_params_from(cfg);
        } else {
            throw ConfigError("sweep supports model.name = ssh or pump");
        }

        Vector psi0, target;
        models::DrivenModel diag_model = base.nominal;
        schedule::PairSelector diag_selector = base.selector;
        if (is_pump) {
            psi0 = bloch_state_on_chain(pump_params, kPi, base.r_start);
            target = bloch_state_on_chain(pump_params, kPi, base.r_end);
            diag_model = bloch_sector_model(pump_params, kPi);
            diag_selector = schedule::PairSelector::sorted_indices(0, 1);
        } else {
            psi0 = models::edge_target(ssh_params, models::Side::Left);
            target = models::zero_mode_state(ssh_params, base.r_end);
        }

        // Fixed-duration schedules are shared across perturbation points.
        SchedulePair fixed_pair;
        if (axis == "perturbation") {
            fixed_pair = schedules_from(cfg, profile, base.r_start, base.r_end);
        }

        struct Row {
            double axis_value = 0.0;
            std::string kind;
            double fn = std::nan("");
            double fr = std::nan("");
            double sp = std::nan("");
            std::string note;
        };
        const int n_points = static_cast<int>(grid_values.size());
        std::vector<Row> rows(static_cast<size_t>(n_points) * 2);

        const auto run_point = [&](int i) {
            const double value = grid_values[static_cast<size_t>(i)];
            Row& lin_row = rows[static_cast<size_t>(i) * 2];
            Row& sc_row = rows[static_cast<size_t>(i) * 2 + 1];
            lin_row.axis_value = sc_row.axis_value = value;
            lin_row.kind = "linear";
            sc_row.kind = "shortcut";
            try {
                SchedulePair pair;
                models::DrivenModel evolved = base.evolved;
                if (axis == "total_time") {
                    Config point_cfg = cfg;
                    point_cfg.set("schedule.T", g17(value));
                    point_cfg.set("schedule.kind", "calibrated");
                    pair = schedules_from(point_cfg, profile, base.r_start, base.r_end);
                } else {
                    pair = fixed_pair;
                    Perturbation pert = base_pert;
                    if (pert.kind == Perturbation::Kind::None) {
                        pert.kind = Perturbation::Kind::UniformOffset;
                    }
                    pert.eta = value;
                    evolved = is_pump ? perturbed_rice_mele(pump_params, pert)
                                      : perturbed_ssh(ssh_params, pert);
                }
                const ScheduleRun lin = run_one(cfg, evolved, diag_model, diag_selector,
                                                pair.linear, psi0, target, "linear");
                const ScheduleRun sc = run_one(cfg, evolved, diag_model, diag_selector,
                                               pair.shortcut, psi0, target, "shortcut");
                lin_row.fn = lin.fidelity_normalized;
                lin_row.fr = lin.fidelity_raw;
                lin_row.sp = lin.diag_element.max_certified;
                sc_row.fn = sc.fidelity_normalized;
                sc_row.fr = sc.fidelity_raw;
                sc_row.sp = sc.diag_element.max_certified;
            } catch (const std::exception& e) {
                std::string note = e.what();
                std::replace(note.begin(), note.end(), ',', ';');
                std::replace(note.begin(), note.end(), '\n', ' ');
                lin_row.note = note;
                sc_row.note = note;
            }
        };

        parallel_for(n_points, cfg.get_int("output.workers", 0), run_point);

        std::vector<std::vector<std::string>> csv_rows;
        csv_rows.reserve(rows.size());
        for (const Row& r : rows) {
            csv_rows.push_back({axis, g17(r.axis_value), r.kind, g17(r.fn), g17(r.fr),
                                g17(r.sp), r.note});
        }
        const fs::path dir = ensure_out_dir(cfg);
        report::write_csv((dir / "sweep.csv").string(), config_header(cfg),
                          {"axis", "value", "schedule", "fidelity_normalized",
                           "fidelity_raw", "s_prime_max", "note"},
                          csv_rows);

        json summary;
        summary["scenario"] = "sweep";
        summary["version"] = report::version();
        summary["seed"] = cfg.get_seed();
        summary["axis"] = axis;
        summary["points"] = n_points;
        summary["config"] = config_echo(cfg);
        write_summary((dir / "summary.json").string(), summary);
    });
}

int run_scenario(const Config& cfg)
{
    const std::string kind = cfg.get("scenario.kind", "");
    if (kind == "ssh-transfer") {
        return run_ssh_transfer(cfg);
    }
    if (kind == "pump") {
        return run_pump(cfg);
    }
    if (kind == "schedule") {
        return run_schedule_only(cfg);
    }
    if (kind == "spectrum") {
        return run_spectrum(cfg);
    }
    if (kind == "sweep") {
        return run_sweep(cfg);
    }
    std::cerr << "unknown scenario kind '" << kind << "'\n";
    return kExitConfig;
}

} // namespace adishort::scenario
