// Copyright 2026 The donorsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "donorsim/runner.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

#include "donorsim/coherence.h"
#include "donorsim/gst/suite.h"
#include "donorsim/noise_models.h"
#include "donorsim/pulse_engine.h"
#include "donorsim/readout.h"
#include "donorsim/rng.h"
#include "donorsim/spin_model.h"
#include "donorsim/tomography.h"

namespace donorsim {

using nlohmann::json;

std::string ValidationReport::str() const {
    std::ostringstream os;
    for (const auto &e : errors) os << "error: " << e.path << ": " << e.message << "\n";
    for (const auto &w : warnings) os << "warning: " << w.path << ": " << w.message << "\n";
    return os.str();
}

ConfigError::ConfigError(ValidationReport report)
    : std::runtime_error("invalid config:\n" + report.str()), report_(std::move(report)) {}

const std::vector<ExperimentKind> &experiment_kinds() {
    static const std::vector<ExperimentKind> kinds = {
        {"spectrum", "ESR line frequencies and pi-pulse flip spectra around each line"},
        {"ramsey", "Ramsey decay and fitted T2*, optionally against an exchange-free reference"},
        {"hahn", "Hahn-echo decay and fitted T2, optionally against an exchange-free reference"},
        {"bell-tomography", "Bell-state preparation with phase-reversal tomography and SPAM correction"},
        {"gst-1q-uncond", "one-qubit GST of the unconditional gates for each spectator state"},
        {"gst-1q-cond", "one-qubit GST of the conditional rotations for each control state"},
        {"gst-2q", "two-qubit GST of the nine-gate set"},
        {"geometric-phase", "control-branch phase of a detuned target rotation against half the solid angle"},
    };
    return kinds;
}

namespace {

const std::set<std::string> kKinds = {"spectrum", "ramsey",       "hahn",   "bell-tomography", "gst-1q-uncond",
                                      "gst-1q-cond", "gst-2q", "geometric-phase"};

bool is_gst(const std::string &kind) { return kind.rfind("gst-", 0) == 0; }

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

/// Reads one JSON object, collecting problems instead of throwing.
class Reader {
   public:
    Reader(const json *node, std::string path, ValidationReport &report)
        : node_(node), path_(std::move(path)), report_(report) {}

    bool present() const { return node_ != nullptr; }
    bool has(const std::string &key) const { return node_ && node_->contains(key); }
    std::string path(const std::string &key) const { return join(path_, key); }
    void error(const std::string &key, const std::string &msg) const { report_.errors.push_back({path(key), msg}); }
    void warning(const std::string &key, const std::string &msg) const {
        report_.warnings.push_back({path(key), msg});
    }

    const json *get(const std::string &key) {
        used_.insert(key);
        if (!node_) return nullptr;
        auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }

    double number(const std::string &key, double fallback, bool allow_inf = false) {
        const json *v = get(key);
        if (!v) return fallback;
        if (v->is_number()) return v->get<double>();
        if (allow_inf && v->is_string() && v->get<std::string>() == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        error(key, allow_inf ? "expected a number or \"inf\"" : "expected a number");
        return fallback;
    }

    int64_t integer(const std::string &key, int64_t fallback, int64_t min_value) {
        const json *v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            error(key, "expected an integer");
            return fallback;
        }
        const int64_t x = v->get<int64_t>();
        if (x < min_value) {
            error(key, "must be at least " + std::to_string(min_value));
            return fallback;
        }
        return x;
    }

    bool boolean(const std::string &key, bool fallback) {
        const json *v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            error(key, "expected true or false");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string choice(const std::string &key, const std::string &fallback, const std::vector<std::string> &allowed) {
        const json *v = get(key);
        if (!v) return fallback;
        if (v->is_string()) {
            const std::string s = v->get<std::string>();
            for (const auto &a : allowed) {
                if (a == s) return s;
            }
        }
        std::string list;
        for (const auto &a : allowed) list += (list.empty() ? "" : ", ") + a;
        error(key, "expected one of " + list);
        return fallback;
    }

    std::string text(const std::string &key, const std::string &fallback) {
        const json *v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            error(key, "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    /// Nested object; absent objects read as empty.
    Reader object(const std::string &key) {
        const json *v = get(key);
        if (v && !v->is_object()) {
            error(key, "expected an object");
            v = nullptr;
        }
        return Reader(v, path(key), report_);
    }

    Reader child(const json *node, const std::string &key) const { return Reader(node, path(key), report_); }

    /// Either an explicit list or {"start", "stop", "count"} (inclusive, linear).
    std::vector<double> grid(const std::string &key, bool required, const std::vector<double> &fallback = {}) {
        const json *v = get(key);
        if (!v) {
            if (required) error(key, "required");
            return fallback;
        }
        std::vector<double> out;
        if (v->is_array()) {
            for (size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number()) {
                    report_.errors.push_back({path(key) + "[" + std::to_string(i) + "]", "expected a number"});
                    continue;
                }
                out.push_back((*v)[i].get<double>());
            }
        } else if (v->is_object()) {
            Reader r(v, path(key), report_);
            const double start = r.number("start", 0.0), stop = r.number("stop", 0.0);
            const int64_t count = r.integer("count", 0, 1);
            if (!r.has("start")) r.error("start", "required");
            if (!r.has("stop")) r.error("stop", "required");
            if (!r.has("count")) r.error("count", "required");
            for (int64_t i = 0; i < count; ++i) {
                out.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1));
            }
            r.finish();
        } else {
            error(key, "expected a list of numbers or {start, stop, count}");
            return fallback;
        }
        if (out.empty()) error(key, "must not be empty");
        return out;
    }

    void finish() const {
        if (!node_) return;
        for (auto it = node_->begin(); it != node_->end(); ++it) {
            if (!used_.count(it.key())) error(it.key(), "unknown field");
        }
    }

   private:
    const json *node_;
    std::string path_;
    ValidationReport &report_;
    std::set<std::string> used_;
};

/// Runs a module validate() and files its message under `path`.
void check(ValidationReport &report, const std::string &path, const std::function<void()> &fn) {
    try {
        fn();
    } catch (const std::exception &e) {
        report.errors.push_back({path, e.what()});
    }
}

struct Parsed {
    std::string kind;
    std::string id;
    uint64_t seed = 0;
    json source;

    SpinSystemParams spin;
    NuclearConfig nucs;
    NoiseParams noise;
    ReadoutModel readout = ReadoutModel::perfect();
    bool has_spin = false, has_nuclei = false, has_noise = false;
    int64_t shots = 10000;

    double spectrum_rabi_mhz = 0.2;
    double spectrum_span_mhz = 2.0;
    int spectrum_points = 201;

    std::vector<double> taus_us;
    CoherenceOptions coherence;
    bool compare_without_exchange = false;

    BellExperimentConfig bell;
    int bell_repetitions = 1;

    gst::DeviceModel device;
    gst::SuiteOptions suite;

    double gp_rabi_mhz = 0.2;
    double gp_rotation_rad = 2.0 * kPi;
    int gp_steps = 4000;
    std::vector<double> gp_ratios;
};

void read_spin(Reader r, SpinSystemParams &p) {
    p.b0_tesla = r.number("b0_tesla", p.b0_tesla);
    p.g1 = r.number("g1", p.g1);
    p.g2 = r.number("g2", p.g2);
    p.a1_mhz = r.number("a1_mhz", p.a1_mhz);
    p.a2_mhz = r.number("a2_mhz", p.a2_mhz);
    p.j_mhz = r.number("j_mhz", p.j_mhz);
    p.gamma_n_mhz_per_t = r.number("gamma_n_mhz_per_t", p.gamma_n_mhz_per_t);
    r.finish();
}

Qubit read_qubit(Reader &r, const std::string &key, Qubit fallback) {
    const std::string s = r.choice(key, fallback == Qubit::Q1 ? "Q1" : "Q2", {"Q1", "Q2"});
    return s == "Q1" ? Qubit::Q1 : Qubit::Q2;
}

void read_noise(Reader r, NoiseParams &n) {
    n.sigma_detuning_q1_mhz = r.number("sigma_detuning_q1_mhz", n.sigma_detuning_q1_mhz);
    n.sigma_detuning_q2_mhz = r.number("sigma_detuning_q2_mhz", n.sigma_detuning_q2_mhz);
    if (const json *jumps = r.get("jumps")) {
        n.jumps.clear();
        if (!jumps->is_array()) {
            r.error("jumps", "expected a list");
        } else {
            for (size_t i = 0; i < jumps->size(); ++i) {
                const std::string key = "jumps[" + std::to_string(i) + "]";
                if (!(*jumps)[i].is_object()) {
                    r.error(key, "expected an object");
                    continue;
                }
                Reader j = r.child(&(*jumps)[i], key);
                JumpCoupling c;
                c.qubit = read_qubit(j, "qubit", Qubit::Q1);
                c.amplitude_mhz = j.number("amplitude_mhz", 0.0);
                j.finish();
                n.jumps.push_back(c);
            }
        }
    }
    n.jump_rate = r.number("jump_rate", n.jump_rate);
    n.jump_rate_in_shot_per_us = r.number("jump_rate_in_shot_per_us", n.jump_rate_in_shot_per_us);
    n.t1_s = r.number("t1_s", n.t1_s, true);
    n.t2_hahn_us = r.number("t2_hahn_us", n.t2_hahn_us, true);
    n.sigma_j_mhz = r.number("sigma_j_mhz", n.sigma_j_mhz);
    n.depolarizing_per_gate = r.number("depolarizing_per_gate", n.depolarizing_per_gate);
    n.idle_depolarizing = r.number("idle_depolarizing", n.idle_depolarizing);
    r.finish();
}

ReadoutModel read_readout(Reader r) {
    const std::string preset = r.choice("preset", "device", {"device", "perfect"});
    ReadoutModel m = preset == "perfect" ? ReadoutModel::perfect() : ReadoutModel{};
    m.p_up_given_up = r.number("p_up_given_up", m.p_up_given_up);
    m.p_up_given_down = r.number("p_up_given_down", m.p_up_given_down);
    m.n_qnd = static_cast<int>(r.integer("n_qnd", m.n_qnd, 1));
    m.t1_s = r.number("t1_s", m.t1_s, true);
    m.cycle_time_s = r.number("cycle_time_s", m.cycle_time_s);
    const std::string rule = r.choice("rule", m.rule == CombineRule::Majority ? "majority" : "threshold",
                                      {"majority", "threshold"});
    m.rule = rule == "majority" ? CombineRule::Majority : CombineRule::Threshold;
    m.threshold = static_cast<int>(r.integer("threshold", m.threshold, 0));
    r.finish();
    return m;
}

void read_device(Reader r, const std::string &kind, gst::DeviceModel &d, gst::SuiteOptions &suite) {
    const std::string preset = r.choice("device", "calibrated", {"noiseless", "calibrated", "miscalibrated"});
    d = preset == "noiseless" ? gst::DeviceModel::noiseless()
        : preset == "calibrated" ? gst::DeviceModel::calibrated()
                                 : gst::DeviceModel::miscalibrated();
    const std::string backend = r.choice("backend", "pulse", {"pulse", "ideal"});
    d.processor.backend = backend == "pulse" ? GateBackend::Pulse : GateBackend::Ideal;
    d.processor.rabi_mhz = r.number("rabi_mhz", d.processor.rabi_mhz);
    d.control_dephasing = r.number("control_dephasing", d.control_dephasing);
    if (const json *offsets = r.get("phase_offsets_rad")) {
        d.phase_offsets_rad.clear();
        if (!offsets->is_object()) {
            r.error("phase_offsets_rad", "expected an object of label: radians");
        } else {
            for (auto it = offsets->begin(); it != offsets->end(); ++it) {
                if (!it->is_number()) {
                    r.error("phase_offsets_rad." + it.key(), "expected a number");
                    continue;
                }
                d.phase_offsets_rad[it.key()] = it->get<double>();
            }
        }
    }
    d.detuning_offset_q1_mhz = r.number("detuning_offset_q1_mhz", d.detuning_offset_q1_mhz);
    d.detuning_offset_q2_mhz = r.number("detuning_offset_q2_mhz", d.detuning_offset_q2_mhz);
    d.prep_error = r.number("prep_error", d.prep_error);
    d.readout_error = r.number("readout_error", d.readout_error);
    d.noise_samples = static_cast<int>(r.integer("noise_samples", d.noise_samples, 1));
    if (const json *lengths = r.get("max_lengths")) {
        suite.max_lengths.clear();
        bool good = lengths->is_array() && !lengths->empty();
        if (good) {
            for (const auto &l : *lengths) {
                if (!l.is_number_integer() || l.get<int64_t>() < 1) {
                    good = false;
                    break;
                }
                suite.max_lengths.push_back(static_cast<int>(l.get<int64_t>()));
            }
        }
        if (!good) r.error("max_lengths", "expected a non-empty list of positive integers");
    }
    suite.estimate.max_iterations =
        static_cast<int>(r.integer("max_iterations", suite.estimate.max_iterations, 1));
    (void)kind;
    r.finish();
}

Parsed parse(const json &config, ValidationReport &report) {
    Parsed p;
    if (!config.is_object()) {
        report.errors.push_back({"", "config must be a JSON object"});
        return p;
    }
    p.source = config;
    Reader top(&config, "", report);
    const json *kind = top.get("experiment");
    if (!kind) {
        top.error("experiment", "required");
    } else if (!kind->is_string() || !kKinds.count(kind->get<std::string>())) {
        std::string list;
        for (const auto &k : experiment_kinds()) list += (list.empty() ? "" : ", ") + k.name;
        top.error("experiment", "expected one of " + list);
    } else {
        p.kind = kind->get<std::string>();
    }
    p.id = top.text("name", p.kind);
    const json *seed = top.get("seed");
    if (!seed) {
        top.error("seed", "required");
    } else if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<int64_t>() >= 0)) {
        top.error("seed", "expected a non-negative integer");
    } else {
        p.seed = seed->get<uint64_t>();
    }
    if (Reader out = top.object("output"); out.present()) {
        out.text("prefix", "");
        out.finish();
    }
    if (p.kind.empty()) return p;

    const bool sampled = p.kind != "spectrum" && p.kind != "geometric-phase";
    const bool physical = p.kind != "geometric-phase";
    if (physical) {
        p.has_spin = top.has("spin");
        read_spin(top.object("spin"), p.spin);
        p.has_nuclei = top.has("nuclei");
        const std::string nucs = top.text("nuclei", p.nucs.str());
        check(report, "nuclei", [&] { p.nucs = NuclearConfig::parse(nucs); });
        check(report, "spin", [&] { p.spin.validate(); });
        if (!p.spin.weak_exchange()) {
            top.warning("spin.j_mhz", "J is not below the average hyperfine coupling; the weak-exchange picture does not apply");
        }
    }
    if (sampled) {
        p.shots = top.integer("shots", p.shots, 1);
        p.has_noise = top.has("noise");
        read_noise(top.object("noise"), p.noise);
        check(report, "noise", [&] { p.noise.validate(); });
    }
    if (p.kind == "ramsey" || p.kind == "hahn" || p.kind == "bell-tomography") {
        if (top.has("readout")) p.readout = read_readout(top.object("readout"));
        check(report, "readout", [&] { p.readout.validate(); });
    }

    if (p.kind == "spectrum") {
        Reader r = top.object("spectrum");
        p.spectrum_rabi_mhz = r.number("rabi_mhz", p.spectrum_rabi_mhz);
        p.spectrum_span_mhz = r.number("span_mhz", p.spectrum_span_mhz);
        p.spectrum_points = static_cast<int>(r.integer("points", p.spectrum_points, 2));
        if (!(p.spectrum_rabi_mhz > 0.0)) r.error("rabi_mhz", "must be positive");
        if (!(p.spectrum_span_mhz > 0.0)) r.error("span_mhz", "must be positive");
        r.finish();
    } else if (p.kind == "ramsey" || p.kind == "hahn") {
        p.taus_us = top.grid("taus_us", true);
        for (size_t i = 0; i < p.taus_us.size(); ++i) {
            if (!(p.taus_us[i] >= 0.0)) top.error("taus_us[" + std::to_string(i) + "]", "must be non-negative");
        }
        Reader r = top.object("coherence");
        CoherenceOptions &c = p.coherence;
        c.target = read_qubit(r, "target", Qubit::Q2);
        c.control = r.choice("control", "down", {"down", "up"}) == "up" ? Spin::Up : Spin::Down;
        c.detuning_mhz = r.number("detuning_mhz", c.detuning_mhz);
        c.sample_outcomes = r.boolean("sample_outcomes", c.sample_outcomes);
        c.hard_pulses = r.boolean("hard_pulses", c.hard_pulses);
        c.rabi_mhz = r.number("rabi_mhz", c.rabi_mhz);
        p.compare_without_exchange = r.boolean("compare_without_exchange", false);
        r.finish();
        c.shots = static_cast<int>(p.shots);
        c.readout = p.readout;
        check(report, "coherence", [&] { c.validate(); });
    } else if (p.kind == "bell-tomography") {
        Reader r = top.object("bell");
        BellExperimentConfig &b = p.bell;
        b.processor.spin = p.spin;
        b.processor.nucs = p.nucs;
        b.processor.rabi_mhz = r.number("rabi_mhz", b.processor.rabi_mhz);
        b.processor.backend =
            r.choice("backend", "pulse", {"pulse", "ideal"}) == "pulse" ? GateBackend::Pulse : GateBackend::Ideal;
        b.noise = p.noise;
        b.readout = p.readout;
        b.prep_error = r.number("prep_error", b.prep_error);
        b.state_depolarizing = r.number("state_depolarizing", b.state_depolarizing);
        b.noise_samples = static_cast<int>(r.integer("noise_samples", b.noise_samples, 1));
        b.phases = default_phases(static_cast<int>(r.integer("phase_points", 24, 3)));
        p.bell_repetitions = static_cast<int>(r.integer("repetitions", 1, 1));
        r.finish();
        b.shots = static_cast<int>(p.shots);
        check(report, "bell", [&] { b.validate(); });
    } else if (is_gst(p.kind)) {
        read_device(top.object("gst"), p.kind, p.device, p.suite);
        if (p.has_spin) p.device.processor.spin = p.spin;
        if (p.has_nuclei) p.device.processor.nucs = p.nucs;
        if (p.has_noise) p.device.noise = p.noise;
        p.suite.shots = p.shots;
        check(report, "gst", [&] { p.device.validate(); });
    } else if (p.kind == "geometric-phase") {
        Reader r = top.object("geometric_phase");
        p.gp_rabi_mhz = r.number("rabi_mhz", p.gp_rabi_mhz);
        p.gp_rotation_rad = r.number("rotation_rad", p.gp_rotation_rad);
        p.gp_steps = static_cast<int>(r.integer("steps", p.gp_steps, 10));
        p.gp_ratios = r.grid("detuning_ratios", false, {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3});
        if (!(p.gp_rabi_mhz > 0.0)) r.error("rabi_mhz", "must be positive");
        for (size_t i = 0; i < p.gp_ratios.size(); ++i) {
            if (!(std::abs(p.gp_ratios[i]) < 2.0)) {
                r.error("detuning_ratios[" + std::to_string(i) + "]", "must lie strictly within (-2, 2)");
            }
        }
        r.finish();
    }
    top.finish();
    return p;
}

// ---------------------------------------------------------------------------
// Experiments.

ResultRecord base_record(const Parsed &p, const std::string &hash, const std::string &suffix = "") {
    ResultRecord r;
    r.experiment_id = suffix.empty() ? p.id : p.id + "/" + suffix;
    r.kind = p.kind;
    r.config_hash = hash;
    r.seed = p.seed;
    return r;
}

std::string line_name(int q, bool up) { return "Q" + std::to_string(q) + "|Q" + std::to_string(3 - q) + (up ? "=up" : "=down"); }

void run_spectrum(const Parsed &p, RunResult &out, const std::string &hash) {
    ResultRecord r = base_record(p, hash);
    const EsrLines eff = esr_frequencies(p.spin, p.nucs);
    const EsrLines full = esr_frequencies_full(p.spin, p.nucs);
    const auto fe = eff.as_array(), ff = full.as_array();
    const char *keys[4] = {"q1_c_down", "q1_c_up", "q2_c_down", "q2_c_up"};
    for (int i = 0; i < 4; ++i) {
        r.metrics[std::string("line.") + keys[i]] = {fe[i], "MHz"};
        r.metrics[std::string("line_full.") + keys[i]] = {ff[i], "MHz"};
    }
    r.metrics["split.q1"] = {std::abs(eff.q1_c_up - eff.q1_c_down), "MHz"};
    r.metrics["split.q2"] = {std::abs(eff.q2_c_up - eff.q2_c_down), "MHz"};
    r.metrics["separation"] = {std::abs(0.5 * (eff.q2_c_down + eff.q2_c_up) - 0.5 * (eff.q1_c_down + eff.q1_c_up)),
                               "MHz"};
    r.metrics["abar"] = {p.spin.abar_mhz(), "MHz"};
    r.metrics["j"] = {p.spin.j_mhz, "MHz"};
    if (p.spin.abar_mhz() > 0.0) r.metrics["cos_theta"] = {std::cos(mixing_angle(p.spin.j_mhz, p.spin.abar_mhz())), "1"};
    r.info["nuclei"] = p.nucs.str();
    r.info["weak_exchange"] = p.spin.weak_exchange() ? "true" : "false";

    const Operator h = effective_electron_hamiltonian(p.spin, p.nucs);
    const EigenSolution eig = eigenstates(p.spin, p.nucs);
    for (int i = 0; i < 4; ++i) {
        const int q = i < 2 ? 1 : 2;
        const bool up = i % 2 == 1;
        const auto levels = line_levels(q, up);
        Curve c;
        c.name = line_name(q, up);
        c.x_label = "drive frequency";
        c.x_unit = "MHz";
        c.y_label = "flip probability";
        c.y_unit = "1";
        for (int k = 0; k < p.spectrum_points; ++k) {
            const double f = fe[i] + p.spectrum_span_mhz * (static_cast<double>(k) / (p.spectrum_points - 1) - 0.5);
            PulseSpec pulse;
            pulse.carrier_mhz = f;
            pulse.rabi_mhz = p.spectrum_rabi_mhz;
            pulse.duration_us = 0.5 / p.spectrum_rabi_mhz;
            const Unitary u = propagate_pulse(h, pulse);
            const Complex a = eig.states.col(levels[1]).dot(u * eig.states.col(levels[0]));
            c.x.push_back(f);
            c.y.push_back(std::norm(a));
        }
        r.curves.push_back(std::move(c));
    }
    out.records.push_back(std::move(r));
}

void add_coherence(ResultRecord &r, const CoherenceCurve &c, const std::string &name, bool ramsey) {
    const std::string t = ramsey ? "t2_star" : "t2";
    r.metrics[name + "." + t] = {c.t2_us, "us"};
    r.metrics[name + "." + t + "_stderr"] = {c.fit.decay_time_stderr, "us"};
    r.metrics[name + ".fit_amplitude"] = {c.fit.amplitude, "1"};
    r.metrics[name + ".fit_exponent"] = {c.fit.exponent, "1"};
    r.metrics[name + ".fit_frequency"] = {c.fit.frequency, "MHz"};
    r.info[name + ".fit_converged"] = c.fit.converged ? "true" : "false";
    r.info[name + ".decay_unresolved"] = c.fit.decay_unresolved ? "true" : "false";
    Curve curve;
    curve.name = name;
    curve.x_label = "free evolution time";
    curve.x_unit = "us";
    curve.y_label = "spin-up proportion";
    curve.y_unit = "1";
    curve.x = c.taus_us;
    curve.y = c.p_up;
    curve.stderr_y = c.stderr_p;
    r.curves.push_back(std::move(curve));
}

void run_coherence(const Parsed &p, RunResult &out, const std::string &hash) {
    const bool ramsey = p.kind == "ramsey";
    auto run = [&](const SpinSystemParams &spin, uint64_t seed) {
        return ramsey ? ramsey_experiment(p.taus_us, spin, p.nucs, p.noise, p.coherence, seed)
                      : hahn_experiment(p.taus_us, spin, p.nucs, p.noise, p.coherence, seed);
    };
    ResultRecord r = base_record(p, hash);
    add_coherence(r, run(p.spin, p.seed), "exchange_on", ramsey);
    if (p.compare_without_exchange) {
        SpinSystemParams off = p.spin;
        off.j_mhz = 0.0;
        add_coherence(r, run(off, splitmix64(p.seed ^ 0x6f6666ULL)), "exchange_off", ramsey);
    }
    r.info["target"] = p.coherence.target == Qubit::Q1 ? "Q1" : "Q2";
    r.metrics["shots"] = {static_cast<double>(p.shots), "count"};
    out.records.push_back(std::move(r));
}

MatrixRecord complex_matrix(const std::string &name, const CMatrix &m) {
    MatrixRecord out{name, static_cast<int>(m.rows()), static_cast<int>(m.cols()), {}, {}};
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            out.real.push_back(m(i, j).real());
            out.imag.push_back(m(i, j).imag());
        }
    }
    return out;
}

MatrixRecord real_matrix(const std::string &name, const RMatrix &m) {
    MatrixRecord out{name, static_cast<int>(m.rows()), static_cast<int>(m.cols()), {}, {}};
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) out.real.push_back(m(i, j));
    }
    return out;
}

void add_reversal(ResultRecord &r, const PhaseReversalData &d, const std::string &tag) {
    for (int q = 1; q <= 2; ++q) {
        Curve c;
        c.name = "Q" + std::to_string(q) + "." + tag;
        c.x_label = "reversal phase";
        c.x_unit = "rad";
        c.y_label = "spin-up proportion";
        c.y_unit = "1";
        c.x = d.phases;
        c.y = q == 1 ? d.p_up_q1 : d.p_up_q2;
        r.curves.push_back(std::move(c));
    }
}

void run_bell(const Parsed &p, RunResult &out, const std::string &hash) {
    const RepeatedBellResult rep = repeated_bell_tomography(p.bell, p.bell_repetitions, p.seed);
    ResultRecord r = base_record(p, hash);
    r.metrics["fidelity"] = {rep.fidelity_mean, "1"};
    r.metrics["fidelity_two_sigma"] = {rep.fidelity_two_sigma, "1"};
    r.metrics["fidelity_uncorrected"] = {rep.fidelity_raw_mean, "1"};
    r.metrics["fidelity_uncorrected_two_sigma"] = {rep.fidelity_raw_two_sigma, "1"};
    r.metrics["concurrence"] = {rep.concurrence_mean, "1"};
    r.metrics["concurrence_two_sigma"] = {rep.concurrence_two_sigma, "1"};
    r.metrics["repetitions"] = {static_cast<double>(rep.runs.size()), "count"};
    const BellTomographyResult &first = rep.runs.front();
    r.metrics["rho11"] = {first.corners_corrected.rho11, "1"};
    r.metrics["rho44"] = {first.corners_corrected.rho44, "1"};
    r.metrics["rho14.abs"] = {std::abs(first.corners_corrected.rho14), "1"};
    r.metrics["rho14.arg"] = {std::arg(first.corners_corrected.rho14), "rad"};
    r.info["corner_exceeds_bound"] = first.corners_corrected.exceeds_bound ? "true" : "false";
    add_reversal(r, first.raw, "raw");
    add_reversal(r, first.corrected, "spam_corrected");
    r.matrices.push_back(complex_matrix("rho_physical", first.rho_physical));
    out.records.push_back(std::move(r));
}

std::string key_name(std::string s) {
    for (char &c : s) {
        if (c == ' ') c = '_';
    }
    return s;
}

void run_gst(const Parsed &p, RunResult &out, const std::string &hash) {
    const gst::SuiteMode mode = p.kind == "gst-2q"        ? gst::SuiteMode::TwoQubit
                                : p.kind == "gst-1q-cond" ? gst::SuiteMode::Cond1q
                                                          : gst::SuiteMode::Uncond1q;
    const gst::SuiteReport report = gst::run_device_suite(mode, p.device, p.suite, p.seed);
    for (const auto &run : report.runs) {
        ResultRecord r = base_record(p, hash, run.name);
        r.info["converged"] = run.estimate.converged ? "true" : "false";
        r.info["diagnostics"] = run.estimate.diagnostics;
        r.metrics["circuits"] = {static_cast<double>(run.num_circuits), "count"};
        r.metrics["iterations"] = {static_cast<double>(run.estimate.iterations), "count"};
        r.metrics["deviance"] = {run.estimate.deviance(), "1"};
        r.metrics["loglik"] = {run.estimate.loglik, "1"};
        r.metrics["shots"] = {static_cast<double>(p.shots), "count"};
        for (const auto &g : run.budget.gates) {
            const std::string l = g.label + ".";
            r.metrics[l + "fidelity"] = {g.fidelity, "1"};
            r.metrics[l + "truth_fidelity"] = {run.truth_budget.at(g.label).fidelity, "1"};
            r.metrics[l + "generator_fidelity"] = {g.generator_fidelity, "1"};
            r.metrics[l + "coherent_infidelity"] = {g.coherent_infidelity, "1"};
            r.metrics[l + "incoherent_infidelity"] = {g.incoherent_infidelity, "1"};
            r.metrics[l + "incoherent_fraction"] = {g.incoherent_fraction, "1"};
            r.metrics[l + "over_rotation"] = {g.over_rotation_rad, "rad"};
            r.metrics[l + "axis_misalignment"] = {g.axis_misalignment_rad, "rad"};
            r.metrics[l + "depolarizing_p"] = {g.depolarizing_p, "1"};
            for (const auto &[cat, v] : g.categories) r.metrics[l + "error." + key_name(cat)] = {v, "1"};
            if (g.branch_warning) r.info[l + "branch_warning"] = "true";
            r.matrices.push_back(real_matrix(g.label + ".ptm", run.gauged.gate(g.label)));
        }
        for (const auto &pm : run.budget.pairs) {
            r.metrics["pair." + pm.x_label + "-" + pm.y_label + ".angle_error"] = {pm.angle_error_rad, "rad"};
        }
        r.matrices.push_back(real_matrix("rho.ptm", run.gauged.rho));
        for (size_t k = 0; k < run.gauged.effects.size(); ++k) {
            r.matrices.push_back(real_matrix("effect" + std::to_string(k) + ".ptm", run.gauged.effects[k]));
        }
        if (!run.estimate.converged) out.converged = false;
        out.records.push_back(std::move(r));
    }
}

void run_geometric(const Parsed &p, RunResult &out, const std::string &hash) {
    ResultRecord r = base_record(p, hash);
    Curve geo{"control_phase_geometric", "detuning", "MHz", "phase", "rad", {}, {}, {}};
    Curve half{"half_solid_angle", "detuning", "MHz", "phase", "rad", {}, {}, {}};
    Curve total{"control_phase_total", "detuning", "MHz", "phase", "rad", {}, {}, {}};
    double worst = 0.0, closure = 0.0;
    for (double ratio : p.gp_ratios) {
        const double det = ratio * p.gp_rabi_mhz;
        const GeometricPhaseResult g = geometric_phase_analysis(det, p.gp_rabi_mhz, p.gp_rotation_rad, p.gp_steps);
        for (Curve *c : {&geo, &half, &total}) c->x.push_back(det);
        geo.y.push_back(g.control_phase_geometric);
        half.y.push_back(g.half_solid_angle);
        total.y.push_back(g.control_phase_total);
        worst = std::max(worst, std::abs(wrap_angle(g.control_phase_geometric - g.half_solid_angle)));
        closure = std::max(closure, g.closure_error);
    }
    r.metrics["max_abs_difference"] = {worst, "rad"};
    r.metrics["max_closure_error"] = {closure, "1"};
    r.metrics["rabi"] = {p.gp_rabi_mhz, "MHz"};
    r.metrics["rotation"] = {p.gp_rotation_rad, "rad"};
    r.curves = {geo, half, total};
    out.records.push_back(std::move(r));
}

json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double json_number(const json &j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("not a number: " + s);
}

json numbers_json(const std::vector<double> &v) {
    json a = json::array();
    for (double x : v) a.push_back(number_json(x));
    return a;
}

std::vector<double> json_numbers(const json &j) {
    std::vector<double> out;
    for (const auto &x : j) out.push_back(json_number(x));
    return out;
}

bool same(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!same(a[i], b[i])) return false;
    }
    return true;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void write_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

}  // namespace

ValidationReport validate_config(const json &config) {
    ValidationReport report;
    parse(config, report);
    return report;
}

std::string config_hash(const json &config) {
    const std::string s = config.dump();
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json ResultRecord::to_json() const {
    json j;
    j["experiment_id"] = experiment_id;
    j["kind"] = kind;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    json m = json::object();
    for (const auto &[k, v] : metrics) m[k] = {{"value", number_json(v.value)}, {"unit", v.unit}};
    j["metrics"] = m;
    j["info"] = info;
    json curves_json = json::array();
    for (const auto &c : curves) {
        json cj = {{"name", c.name},           {"x_label", c.x_label}, {"x_unit", c.x_unit},
                   {"y_label", c.y_label},     {"y_unit", c.y_unit},   {"x", numbers_json(c.x)},
                   {"y", numbers_json(c.y)}, {"stderr", numbers_json(c.stderr_y)}};
        curves_json.push_back(cj);
    }
    j["curves"] = curves_json;
    json mats = json::array();
    for (const auto &mr : matrices) {
        json mj = {{"name", mr.name}, {"rows", mr.rows}, {"cols", mr.cols}, {"real", numbers_json(mr.real)}};
        if (!mr.imag.empty()) mj["imag"] = numbers_json(mr.imag);
        mats.push_back(mj);
    }
    j["matrices"] = mats;
    return j;
}

ResultRecord ResultRecord::from_json(const json &j) {
    ResultRecord r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it) {
        r.metrics[it.key()] = {json_number(it->at("value")), it->at("unit").get<std::string>()};
    }
    r.info = j.at("info").get<std::map<std::string, std::string>>();
    for (const auto &cj : j.at("curves")) {
        Curve c;
        c.name = cj.at("name").get<std::string>();
        c.x_label = cj.at("x_label").get<std::string>();
        c.x_unit = cj.at("x_unit").get<std::string>();
        c.y_label = cj.at("y_label").get<std::string>();
        c.y_unit = cj.at("y_unit").get<std::string>();
        c.x = json_numbers(cj.at("x"));
        c.y = json_numbers(cj.at("y"));
        c.stderr_y = json_numbers(cj.at("stderr"));
        r.curves.push_back(std::move(c));
    }
    for (const auto &mj : j.at("matrices")) {
        MatrixRecord m;
        m.name = mj.at("name").get<std::string>();
        m.rows = mj.at("rows").get<int>();
        m.cols = mj.at("cols").get<int>();
        m.real = json_numbers(mj.at("real"));
        if (mj.contains("imag")) m.imag = json_numbers(mj.at("imag"));
        r.matrices.push_back(std::move(m));
    }
    return r;
}

bool ResultRecord::operator==(const ResultRecord &o) const {
    if (experiment_id != o.experiment_id || kind != o.kind || config_hash != o.config_hash || seed != o.seed ||
        info != o.info || metrics.size() != o.metrics.size() || curves.size() != o.curves.size() ||
        matrices.size() != o.matrices.size()) {
        return false;
    }
    for (const auto &[k, v] : metrics) {
        auto it = o.metrics.find(k);
        if (it == o.metrics.end() || !same(v.value, it->second.value) || v.unit != it->second.unit) return false;
    }
    for (size_t i = 0; i < curves.size(); ++i) {
        const Curve &a = curves[i], &b = o.curves[i];
        if (a.name != b.name || a.x_label != b.x_label || a.x_unit != b.x_unit || a.y_label != b.y_label ||
            a.y_unit != b.y_unit || !same(a.x, b.x) || !same(a.y, b.y) || !same(a.stderr_y, b.stderr_y)) {
            return false;
        }
    }
    for (size_t i = 0; i < matrices.size(); ++i) {
        const MatrixRecord &a = matrices[i], &b = o.matrices[i];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols || !same(a.real, b.real) ||
            !same(a.imag, b.imag)) {
            return false;
        }
    }
    return true;
}

RunResult run_experiment(const json &config, std::optional<uint64_t> seed) {
    json effective = config;
    if (seed && effective.is_object()) effective["seed"] = *seed;
    ValidationReport report;
    const Parsed p = parse(effective, report);
    if (!report.ok()) throw ConfigError(report);
    const std::string hash = config_hash(effective);
    RunResult out;
    out.warnings = report.warnings;
    try {
        if (p.kind == "spectrum") {
            run_spectrum(p, out, hash);
        } else if (p.kind == "ramsey" || p.kind == "hahn") {
            run_coherence(p, out, hash);
        } else if (p.kind == "bell-tomography") {
            run_bell(p, out, hash);
        } else if (is_gst(p.kind)) {
            run_gst(p, out, hash);
        } else {
            run_geometric(p, out, hash);
        }
    } catch (const std::exception &e) {
        throw std::runtime_error(p.id + " (" + p.kind + "): " + e.what());
    }
    return out;
}

std::vector<std::filesystem::path> write_outputs(const RunResult &result, const std::filesystem::path &dir,
                                                 const std::string &prefix) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    std::string jsonl;
    for (const auto &r : result.records) jsonl += r.to_json().dump() + "\n";
    written.push_back(dir / (prefix + ".jsonl"));
    write_atomic(written.back(), jsonl);

    std::ostringstream csv;
    bool any = false;
    csv << "experiment_id,curve,x_label,x_unit,y_label,y_unit,x,y,stderr\n";
    for (const auto &r : result.records) {
        for (const auto &c : r.curves) {
            any = true;
            const std::string head = csv_field(r.experiment_id) + "," + csv_field(c.name) + "," + csv_field(c.x_label) +
                                     "," + csv_field(c.x_unit) + "," + csv_field(c.y_label) + "," + csv_field(c.y_unit);
            for (size_t i = 0; i < c.x.size(); ++i) {
                csv << head << "," << fmt(c.x[i]) << "," << fmt(c.y[i]) << ","
                    << (i < c.stderr_y.size() ? fmt(c.stderr_y[i]) : "") << "\n";
            }
        }
    }
    if (any) {
        written.push_back(dir / (prefix + ".csv"));
        write_atomic(written.back(), csv.str());
    }
    return written;
}

std::string output_prefix(const json &config) {
    if (config.is_object()) {
        auto out = config.find("output");
        if (out != config.end() && out->is_object() && out->contains("prefix") && (*out)["prefix"].is_string() &&
            !(*out)["prefix"].get<std::string>().empty()) {
            return (*out)["prefix"].get<std::string>();
        }
        for (const char *key : {"name", "experiment"}) {
            auto it = config.find(key);
            if (it != config.end() && it->is_string()) return it->get<std::string>();
        }
    }
    return "result";
}

}  // namespace donorsim
