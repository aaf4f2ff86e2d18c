#include "hgsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "hgsim/errors.hpp"

namespace hgsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

struct KeyVal {
    std::string value;
    int line = 0;
};

// section name -> key -> value (duplicates rejected at parse time)
using Sections = std::map<std::string, std::map<std::string, KeyVal>>;

Sections parse_ini(const std::string& text, const std::set<std::string>& sections) {
    Sections out;
    std::istringstream in(text);
    std::string raw;
    std::string current;  // "" = top level
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == ';' || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": malformed section header");
            current = trim(line.substr(1, line.size() - 2));
            if (!sections.count(current))
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": unknown section [" + current + "]");
            out[current];  // a section may legitimately stay empty
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        auto& sec = out[current];
        if (sec.count(key))
            throw ConfigError("line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        sec[key] = KeyVal{value, line_no};
    }
    return out;
}

double parse_num(const std::string& key, const KeyVal& kv) {
    const char* first = kv.value.data();
    const char* last = first + kv.value.size();
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("line " + std::to_string(kv.line) + ": value for '" +
                          key + "' is not a number");
    return out;
}

bool parse_flag(const std::string& key, const KeyVal& kv) {
    const std::string& v = kv.value;
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("line " + std::to_string(kv.line) + ": value for '" + key +
                      "' is not a boolean (true/false/on/off/1/0)");
}

// Helpers over one parsed section.
struct SectionView {
    const std::map<std::string, KeyVal>* kvs = nullptr;

    bool present() const { return kvs != nullptr; }
    const KeyVal* find(const std::string& key) const {
        if (!kvs) return nullptr;
        const auto it = kvs->find(key);
        return it == kvs->end() ? nullptr : &it->second;
    }
    void set_num(const std::string& key, double& dst) const {
        if (const KeyVal* kv = find(key)) dst = parse_num(key, *kv);
    }
    void set_flag(const std::string& key, bool& dst) const {
        if (const KeyVal* kv = find(key)) dst = parse_flag(key, *kv);
    }
    void expect_keys(const std::string& section,
                     const std::set<std::string>& allowed) const {
        if (!kvs) return;
        for (const auto& [key, kv] : *kvs)
            if (!allowed.count(key))
                throw ConfigError("line " + std::to_string(kv.line) +
                                  ": unknown key '" + key + "' in [" + section +
                                  "]");
    }
};

SectionView view(const Sections& s, const std::string& name) {
    const auto it = s.find(name);
    return SectionView{it == s.end() ? nullptr : &it->second};
}

// Move top-level `section = preset:name` shorthands into their sections.
void hoist_preset_shorthands(Sections& s) {
    const auto top = s.find("");
    if (top == s.end()) return;
    for (const auto& [key, kv] : top->second) {
        static const std::set<std::string> hoistable{
            "course", "vehicle", "driver", "neuromuscular", "haptic"};
        if (!hoistable.count(key))
            throw ConfigError("line " + std::to_string(kv.line) +
                              ": key '" + key + "' outside any section");
        if (kv.value.rfind("preset:", 0) != 0)
            throw ConfigError("line " + std::to_string(kv.line) + ": '" + key +
                              "' outside a section must be 'preset:<name>'");
        auto& sec = s[key];
        if (sec.count("preset"))
            throw ConfigError("line " + std::to_string(kv.line) +
                              ": preset for '" + key + "' given twice");
        sec["preset"] = KeyVal{kv.value.substr(7), kv.line};
    }
    s.erase("");
}

const std::set<std::string> kScenarioSections{
    "", "course", "vehicle", "driver", "neuromuscular", "haptic", "pulse", "run"};

void apply_course(const SectionView& sec, Scenario& sc) {
    sec.expect_keys("course", {"preset", "lane_width_m"});
    if (const KeyVal* kv = sec.find("preset"))
        if (kv->value != "thesis")
            throw ConfigError("line " + std::to_string(kv->line) +
                              ": unknown course preset '" + kv->value + "'");
    if (const KeyVal* kv = sec.find("lane_width_m")) {
        const double w = parse_num("lane_width_m", *kv);
        sc.course = Course(sc.course.segments(), w);
    }
}

void apply_vehicle(const SectionView& sec, Scenario& sc) {
    sec.expect_keys("vehicle",
                    {"preset", "m_kg", "I_kgm2", "l_f_m", "l_r_m",
                     "K_f_N_per_rad", "K_r_N_per_rad", "v_kmh", "v_mps", "E_t",
                     "K_s_Nm_per_rad", "K_t", "J_s_kgm2", "B_s_Nms_per_rad"});
    if (const KeyVal* kv = sec.find("preset")) {
        if (kv->value != "thesis")
            throw ConfigError("line " + std::to_string(kv->line) +
                              ": unknown vehicle preset '" + kv->value + "'");
        sc.vehicle = vehicle_preset_default();
    }
    VehicleParams& p = sc.vehicle;
    sec.set_num("m_kg", p.m);
    sec.set_num("I_kgm2", p.I);
    sec.set_num("l_f_m", p.l_f);
    sec.set_num("l_r_m", p.l_r);
    sec.set_num("K_f_N_per_rad", p.K_f);
    sec.set_num("K_r_N_per_rad", p.K_r);
    sec.set_num("E_t", p.E_t);
    sec.set_num("K_s_Nm_per_rad", p.K_s);
    sec.set_num("K_t", p.K_t);
    sec.set_num("J_s_kgm2", p.J_s);
    sec.set_num("B_s_Nms_per_rad", p.B_s);
    const KeyVal* kmh = sec.find("v_kmh");
    const KeyVal* mps = sec.find("v_mps");
    if (kmh && mps)
        throw ConfigError("line " + std::to_string(mps->line) +
                          ": give either v_kmh or v_mps, not both");
    if (kmh) p.v = parse_num("v_kmh", *kmh) / 3.6;
    if (mps) p.v = parse_num("v_mps", *mps);
}

void apply_driver(const SectionView& sec, Scenario& sc) {
    sec.expect_keys("driver", {"preset", "a1", "a2", "a3", "a4", "t_n_s", "t_f_s",
                               "t_p_s", "far_point"});
    if (const KeyVal* kv = sec.find("preset")) sc.driver = driver_preset(kv->value);
    DriverParams& d = sc.driver;
    sec.set_num("a1", d.a1);
    sec.set_num("a2", d.a2);
    sec.set_num("a3", d.a3);
    sec.set_num("a4", d.a4);
    sec.set_num("t_n_s", d.t_n);
    sec.set_num("t_f_s", d.t_f);
    sec.set_num("t_p_s", d.t_p);
    sec.set_flag("far_point", d.far_point_enabled);
}

void apply_haptic(const SectionView& sec, Scenario& sc) {
    sec.expect_keys("haptic", {"preset", "level", "K1", "a1p", "a2p", "a3p", "a4p",
                               "t_n_s", "t_f_s", "torque_limit_Nm"});
    if (const KeyVal* kv = sec.find("preset")) sc.haptic = haptic_preset(kv->value);
    HapticParams& h = sc.haptic;
    const KeyVal* level = sec.find("level");
    const KeyVal* k1 = sec.find("K1");
    if (level && k1)
        throw ConfigError("line " + std::to_string(k1->line) +
                          ": give either level or K1, not both");
    if (level) h = guidance_level(h, guidance_level_from_string(level->value));
    if (k1) h.K1 = parse_num("K1", *k1);
    sec.set_num("a1p", h.a1p);
    sec.set_num("a2p", h.a2p);
    sec.set_num("a3p", h.a3p);
    sec.set_num("a4p", h.a4p);
    sec.set_num("t_n_s", h.t_n);
    sec.set_num("t_f_s", h.t_f);
    sec.set_num("torque_limit_Nm", h.torque_limit);
}

void apply_neuromuscular(const SectionView& sec, Scenario& sc) {
    // Without an explicit section the torque-generation set pairs with the
    // guidance level: manual gains when guidance is off, assisted otherwise.
    if (!sec.present()) {
        sc.neuromuscular =
            neuromuscular_preset(sc.haptic.K1 > 0.0 ? "assisted" : "manual");
        return;
    }
    sec.expect_keys("neuromuscular", {"preset", "K_d_Nm_per_rad", "K_hf",
                                      "K_nms_Nm_per_rad", "t_nms_s"});
    if (const KeyVal* kv = sec.find("preset"))
        sc.neuromuscular = neuromuscular_preset(kv->value);
    NeuromuscularParams& n = sc.neuromuscular;
    sec.set_num("K_d_Nm_per_rad", n.K_d);
    sec.set_num("K_hf", n.K_hf);
    sec.set_num("K_nms_Nm_per_rad", n.K_nms);
    sec.set_num("t_nms_s", n.t_nms);
}

void apply_pulse(const SectionView& sec, Scenario& sc) {
    if (!sec.present()) return;
    sec.expect_keys("pulse", {"start_time_s", "duration_s", "magnitude_Nm"});
    const KeyVal* t0 = sec.find("start_time_s");
    const KeyVal* dur = sec.find("duration_s");
    const KeyVal* mag = sec.find("magnitude_Nm");
    if (!t0 || !dur || !mag)
        throw ConfigError(
            "[pulse] needs all of start_time_s, duration_s, magnitude_Nm");
    sc.pulse = PulseSpec{parse_num("start_time_s", *t0),
                         parse_num("duration_s", *dur),
                         parse_num("magnitude_Nm", *mag)};
}

void apply_run(const SectionView& sec, Scenario& sc) {
    sec.expect_keys("run", {"t_end_s", "step_s", "log_rate_hz"});
    sec.set_num("t_end_s", sc.t_end);
    sec.set_num("step_s", sc.integrator_step);
    sec.set_num("log_rate_hz", sc.log_rate);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Scenario scenario_from_text(const std::string& text) {
    Sections s = parse_ini(text, kScenarioSections);
    hoist_preset_shorthands(s);

    Scenario sc;
    apply_course(view(s, "course"), sc);
    apply_vehicle(view(s, "vehicle"), sc);
    apply_driver(view(s, "driver"), sc);
    apply_haptic(view(s, "haptic"), sc);
    apply_neuromuscular(view(s, "neuromuscular"), sc);  // after haptic: pairing
    apply_pulse(view(s, "pulse"), sc);
    apply_run(view(s, "run"), sc);
    sc.validate();
    return sc;
}

Scenario load_scenario_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_text(buf.str());
}

std::string canonical_config(const Scenario& sc) {
    std::ostringstream out;
    out << "[course]\n";
    out << "preset = thesis\n";
    out << "lane_width_m = " << num(sc.course.lane_width()) << "\n";

    const VehicleParams& p = sc.vehicle;
    out << "[vehicle]\n";
    out << "m_kg = " << num(p.m) << "\n";
    out << "I_kgm2 = " << num(p.I) << "\n";
    out << "l_f_m = " << num(p.l_f) << "\n";
    out << "l_r_m = " << num(p.l_r) << "\n";
    out << "K_f_N_per_rad = " << num(p.K_f) << "\n";
    out << "K_r_N_per_rad = " << num(p.K_r) << "\n";
    out << "v_mps = " << num(p.v) << "\n";
    out << "E_t = " << num(p.E_t) << "\n";
    out << "K_s_Nm_per_rad = " << num(p.K_s) << "\n";
    out << "K_t = " << num(p.K_t) << "\n";
    out << "J_s_kgm2 = " << num(p.J_s) << "\n";
    out << "B_s_Nms_per_rad = " << num(p.B_s) << "\n";

    const DriverParams& d = sc.driver;
    out << "[driver]\n";
    out << "a1 = " << num(d.a1) << "\n";
    out << "a2 = " << num(d.a2) << "\n";
    out << "a3 = " << num(d.a3) << "\n";
    out << "a4 = " << num(d.a4) << "\n";
    out << "t_n_s = " << num(d.t_n) << "\n";
    out << "t_f_s = " << num(d.t_f) << "\n";
    out << "t_p_s = " << num(d.t_p) << "\n";
    out << "far_point = " << (d.far_point_enabled ? "true" : "false") << "\n";

    const NeuromuscularParams& n = sc.neuromuscular;
    out << "[neuromuscular]\n";
    out << "K_d_Nm_per_rad = " << num(n.K_d) << "\n";
    out << "K_hf = " << num(n.K_hf) << "\n";
    out << "K_nms_Nm_per_rad = " << num(n.K_nms) << "\n";
    out << "t_nms_s = " << num(n.t_nms) << "\n";

    const HapticParams& h = sc.haptic;
    out << "[haptic]\n";
    out << "a1p = " << num(h.a1p) << "\n";
    out << "a2p = " << num(h.a2p) << "\n";
    out << "a3p = " << num(h.a3p) << "\n";
    out << "a4p = " << num(h.a4p) << "\n";
    out << "K1 = " << num(h.K1) << "\n";
    out << "t_n_s = " << num(h.t_n) << "\n";
    out << "t_f_s = " << num(h.t_f) << "\n";
    out << "torque_limit_Nm = " << num(h.torque_limit) << "\n";

    if (sc.pulse) {
        out << "[pulse]\n";
        out << "start_time_s = " << num(sc.pulse->start_time) << "\n";
        out << "duration_s = " << num(sc.pulse->duration) << "\n";
        out << "magnitude_Nm = " << num(sc.pulse->magnitude) << "\n";
    }

    out << "[run]\n";
    out << "t_end_s = " << num(sc.t_end) << "\n";
    out << "step_s = " << num(sc.integrator_step) << "\n";
    out << "log_rate_hz = " << num(sc.log_rate) << "\n";
    return out.str();
}

std::string run_id(const Scenario& sc) {
    const std::string text = canonical_config(sc);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

IdentInit ident_init_from_text(const std::string& text) {
    static const std::set<std::string> sections{"", "theta0", "bounds", "fixed",
                                                "weights"};
    Sections s = parse_ini(text, sections);
    if (s.count("") && !s[""].empty())
        throw ConfigError("line " + std::to_string(s[""].begin()->second.line) +
                          ": key outside any section");

    IdentInit init;
    const SectionView th = view(s, "theta0");
    th.expect_keys("theta0", {"a1", "a2", "a4", "t_p", "K_d", "K_hf"});
    th.set_num("a1", init.theta0.a1);
    th.set_num("a2", init.theta0.a2);
    th.set_num("a4", init.theta0.a4);
    th.set_num("t_p", init.theta0.t_p);
    th.set_num("K_d", init.theta0.K_d);
    th.set_num("K_hf", init.theta0.K_hf);

    const SectionView bd = view(s, "bounds");
    {
        std::set<std::string> allowed;
        for (const char* name : IdentTheta::names()) {
            allowed.insert(std::string(name) + "_lo");
            allowed.insert(std::string(name) + "_hi");
        }
        bd.expect_keys("bounds", allowed);
        for (int j = 0; j < IdentTheta::kCount; ++j) {
            const std::string name = IdentTheta::names()[j];
            bd.set_num(name + "_lo", init.bounds.lo[static_cast<std::size_t>(j)]);
            bd.set_num(name + "_hi", init.bounds.hi[static_cast<std::size_t>(j)]);
        }
    }

    const SectionView fx = view(s, "fixed");
    fx.expect_keys("fixed", {"K_nms", "t_nms"});
    fx.set_num("K_nms", init.fixed.K_nms);
    fx.set_num("t_nms", init.fixed.t_nms);

    const SectionView w = view(s, "weights");
    w.expect_keys("weights", {"T_d", "phi"});
    w.set_num("T_d", init.output_weights[0]);
    w.set_num("phi", init.output_weights[1]);
    return init;
}

IdentInit load_ident_init(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open init file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return ident_init_from_text(buf.str());
}

}  // namespace hgsim
