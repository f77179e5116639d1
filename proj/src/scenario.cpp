#include "qsme/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "qsme/errors.hpp"
#include "qsme/io.hpp"

namespace qsme {

using nlohmann::json;

Scenario default_scenario() {
    Scenario s;
    s.phys = PhysParams{0.3, 0.3, 1.3};
    s.est = EstParams{0.5, 0.5, 1.5};
    s.law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    s.ic = CoupledState{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    s.sde = SdeConfig{};
    s.sde.seed = 42;
    s.n_traj = 10;
    return s;
}

namespace {

const json& require_key(const json& j, const char* key) {
    if (!j.contains(key)) throw config_error(std::string("missing required key: ") + key);
    return j.at(key);
}

double get_num(const json& j, const char* key) {
    const json& v = require_key(j, key);
    if (!v.is_number()) throw config_error(std::string(key) + " must be a number");
    return v.get<double>();
}

double get_num_or(const json& j, const char* key, double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) throw config_error(std::string(key) + " must be a number");
    return v.get<double>();
}

std::int64_t get_int_or(const json& j, const char* key, std::int64_t def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw config_error(std::string(key) + " must be an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_uint_or(const json& j, const char* key, std::uint64_t def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw config_error(std::string(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_str_or(const json& j, const char* key, const std::string& def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_string()) throw config_error(std::string(key) + " must be a string");
    return v.get<std::string>();
}

BlochVector get_vec3_or(const json& j, const char* key, const BlochVector& def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        throw config_error(std::string(key) + " must be an array of 3 numbers");
    return BlochVector{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "omega",   "eta",     "M",          "omega_hat",     "eta_hat",
        "M_hat",   "target",  "alpha",      "beta",          "ic",
        "ic_hat",  "dt",      "t_final",    "seed",          "n_traj",
        "record_stride",      "law",        "radius",        "threshold",
        "window_start",       "window_end",
    };
    return keys;
}

} // namespace

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    for (const auto& item : j.items())
        if (!known_keys().count(item.key()))
            throw config_error("unknown config key: " + item.key());

    Scenario s;
    s.phys.omega = get_num(j, "omega");
    s.phys.eta = get_num(j, "eta");
    s.phys.M = get_num(j, "M");
    s.est.omega_hat = get_num(j, "omega_hat");
    s.est.eta_hat = get_num(j, "eta_hat");
    s.est.M_hat = get_num(j, "M_hat");

    Target target = target_from_string(get_str_or(j, "target", "excited"));
    std::string law = get_str_or(j, "law", "power");
    if (law == "power") {
        s.law = FeedbackLaw::power(target, get_num(j, "alpha"), get_num(j, "beta"));
    } else if (law == "zero") {
        s.law = FeedbackLaw::zero(target);
    } else {
        throw config_error("law must be \"power\" or \"zero\", got \"" + law + "\"");
    }

    s.ic.actual = get_vec3_or(j, "ic", {1.0, 0.0, 0.0});
    s.ic.estimate = get_vec3_or(j, "ic_hat", {0.0, 1.0, 0.0});

    s.sde.dt = get_num_or(j, "dt", 1e-3);
    s.sde.t_final = get_num_or(j, "t_final", 10.0);
    s.sde.record_stride = get_int_or(j, "record_stride", 10);
    s.sde.seed = get_uint_or(j, "seed", 42);
    s.n_traj = static_cast<int>(get_int_or(j, "n_traj", 10));
    s.radius = get_num_or(j, "radius", 0.1);
    s.threshold = get_num_or(j, "threshold", 0.05);
    s.window_start = get_num_or(j, "window_start", -1.0);
    s.window_end = get_num_or(j, "window_end", -1.0);

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
    return parse_scenario(j);
}

void validate(const Scenario& s) {
    validate(s.phys);
    validate(s.est);
    validate(s.sde);
    if (!s.ic.actual.in_ball()) throw config_error("ic outside the Bloch ball");
    if (!s.ic.estimate.in_ball()) throw config_error("ic_hat outside the Bloch ball");
    if (s.n_traj < 1) throw config_error("n_traj must be >= 1");
    if (!(s.radius > 0.0 && s.radius < std::numbers::sqrt2))
        throw config_error("radius must be in (0, sqrt(2))");
    if (!(s.threshold > 0.0)) throw config_error("threshold must be > 0");
    if (s.window_start >= 0.0 && s.window_end >= 0.0 && !(s.window_start < s.window_end))
        throw config_error("window_start must be < window_end");
}

json resolved_json(const Scenario& s) {
    json j;
    j["omega"] = s.phys.omega;
    j["eta"] = s.phys.eta;
    j["M"] = s.phys.M;
    j["omega_hat"] = s.est.omega_hat;
    j["eta_hat"] = s.est.eta_hat;
    j["M_hat"] = s.est.M_hat;
    j["target"] = to_string(s.law.target);
    j["law"] = s.law.kind == LawKind::Zero ? "zero" : "power";
    if (s.law.kind == LawKind::Power) {
        j["alpha"] = s.law.alpha;
        j["beta"] = s.law.beta;
    }
    j["ic"] = {s.ic.actual.x, s.ic.actual.y, s.ic.actual.z};
    j["ic_hat"] = {s.ic.estimate.x, s.ic.estimate.y, s.ic.estimate.z};
    j["dt"] = s.sde.dt;
    j["t_final"] = s.sde.t_final;
    j["record_stride"] = s.sde.record_stride;
    j["seed"] = s.sde.seed;
    j["n_traj"] = s.n_traj;
    j["radius"] = s.radius;
    j["threshold"] = s.threshold;
    if (s.window_start >= 0.0) j["window_start"] = s.window_start;
    if (s.window_end >= 0.0) j["window_end"] = s.window_end;
    return j;
}

} // namespace qsme
