#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "adishort/dynamics.hpp"
#include "adishort/gap_schedule.hpp"
#include "adishort/models.hpp"

namespace adishort::scenario {

using spectral::Vector;

// Configuration problems (bad keys, invalid parameter ranges) map to exit
// code 2; numerical failures inside a run map to exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Flat "section.key = value" configuration.  Sections come from an INI-style
// file; command-line overrides win over file values.
class Config {
public:
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_seed() const;
    std::vector<double> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Static parameter error applied to the evolved system while the schedule
// stays designed for the nominal one.
struct Perturbation {
    enum class Kind { None, UniformOffset, RandomDisorder };
    Kind kind = Kind::None;
    std::string term = "t1";
    double eta = 0.0;
    std::uint64_t seed = 1;
};

Perturbation perturbation_from(const Config& cfg);

models::DrivenModel perturbed_ssh(const models::SshParams& p, const Perturbation& spec);
models::DrivenModel perturbed_rice_mele(const models::RiceMeleParams& p,
                                        const Perturbation& spec);

// Single-particle pump state: occupied Bloch state at momentum k embedded in
// the real-space periodic chain.
Vector bloch_state_on_chain(const models::RiceMeleParams& p, double k, double phi);

// The k-resolved two-level sector of the periodic pump chain, driven by phi.
models::DrivenModel bloch_sector_model(const models::RiceMeleParams& p, double k);

// Scenario runners; each writes its report files under output.dir and returns
// a process exit code.
int run_ssh_transfer(const Config& cfg);
int run_pump(const Config& cfg);
int run_schedule_only(const Config& cfg);
int run_spectrum(const Config& cfg);
int run_sweep(const Config& cfg);

// Dispatch on scenario.kind.
int run_scenario(const Config& cfg);

} // namespace adishort::scenario
