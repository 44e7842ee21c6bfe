#include "icrb/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "icrb/errors.hpp"

namespace icrb {
namespace {

using nlohmann::json;

// Times within this of a segment boundary count as on it (profile
// contiguity and coverage checks).
constexpr double kTimeTol = 1e-9;

[[noreturn]] void fail(const std::string& msg) { throw InvalidScenarioError(msg); }

void check_known_keys(const json& obj, const std::set<std::string>& known,
                      const std::string& where) {
    if (!obj.is_object()) {
        fail(where + ": expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        if (known.find(item.key()) == known.end()) {
            fail(where + ": unknown field \"" + item.key() + "\"");
        }
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        fail(where + ": missing required field \"" + key + "\"");
    }
    return *it;
}

double parse_finite_number(const json& v, const std::string& where) {
    if (!v.is_number()) {
        fail(where + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        fail(where + ": number is not finite");
    }
    return x;
}

double parse_positive(const json& v, const std::string& where) {
    const double x = parse_finite_number(v, where);
    if (x <= 0.0) {
        fail(where + ": must be positive");
    }
    return x;
}

Vec3 parse_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) {
        fail(where + ": expected an array of 3 numbers");
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        out(i) = parse_finite_number(v[static_cast<std::size_t>(i)],
                                     where + "[" + std::to_string(i) + "]");
    }
    return out;
}

std::uint64_t parse_seed(const json& v, const std::string& where) {
    if (!v.is_number_integer()) {
        fail(where + ": expected an integer");
    }
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    const auto s = v.get<std::int64_t>();
    if (s < 0) {
        fail(where + ": must be non-negative");
    }
    return static_cast<std::uint64_t>(s);
}

std::size_t parse_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() ||
        (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 1)) {
        fail(where + ": expected a positive integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n < 1) {
        fail(where + ": must be at least 1");
    }
    return static_cast<std::size_t>(n);
}

Reference parse_reference(const json& v, const std::string& where) {
    check_known_keys(v, {"d", "sigma"}, where);
    Reference ref;
    ref.d = parse_vec3(require(v, "d", where), where + ".d");
    ref.sigma = parse_positive(require(v, "sigma", where), where + ".sigma");
    if (ref.d.norm() == 0.0) {
        fail(where + ".d: zero direction");
    }
    return ref;
}

EpochSpec parse_epoch(const json& v, const std::string& where) {
    check_known_keys(v, {"t_n", "d0", "d1", "sigma0", "sigma1"}, where);
    EpochSpec e;
    e.t_n = parse_finite_number(require(v, "t_n", where), where + ".t_n");
    e.d0 = parse_vec3(require(v, "d0", where), where + ".d0");
    e.d1 = parse_vec3(require(v, "d1", where), where + ".d1");
    e.sigma0 = parse_positive(require(v, "sigma0", where), where + ".sigma0");
    e.sigma1 = parse_positive(require(v, "sigma1", where), where + ".sigma1");
    if (e.d0.norm() == 0.0 || e.d1.norm() == 0.0) {
        fail(where + ": zero reference direction");
    }
    return e;
}

OmegaSegment parse_segment(const json& v, const std::string& where) {
    check_known_keys(v, {"t_start", "t_end", "omega"}, where);
    OmegaSegment seg;
    seg.t_start = parse_finite_number(require(v, "t_start", where), where + ".t_start");
    seg.t_end = parse_finite_number(require(v, "t_end", where), where + ".t_end");
    seg.omega = parse_vec3(require(v, "omega", where), where + ".omega");
    if (seg.t_end <= seg.t_start) {
        fail(where + ": t_end must exceed t_start");
    }
    return seg;
}

} // namespace

void validate_scenario(const Scenario& s) {
    if (s.n_trials < 1) {
        fail("scenario: n_trials must be at least 1");
    }
    if (!s.true_initial_attitude.allFinite()) {
        fail("scenario: true_initial_attitude must be finite");
    }
    if (s.mode == ScenarioMode::static_wahba) {
        if (s.refs.empty()) {
            fail("scenario: static_wahba mode requires refs");
        }
        if (!s.epochs.empty() || !s.omega_profile.empty()) {
            fail("scenario: epochs/omega_profile are dynamic-mode fields");
        }
        for (const Reference& ref : s.refs) {
            if (ref.d.norm() == 0.0 || ref.sigma <= 0.0) {
                fail("scenario: refs entries need a nonzero d and positive sigma");
            }
        }
        return;
    }
    // dynamic_iekf
    if (!s.refs.empty()) {
        fail("scenario: refs is a static-mode field");
    }
    if (s.epochs.empty()) {
        fail("scenario: dynamic_iekf mode requires epochs");
    }
    for (std::size_t i = 0; i + 1 < s.epochs.size(); ++i) {
        if (!(s.epochs[i].t_n < s.epochs[i + 1].t_n)) {
            fail("scenario: epoch times must be strictly increasing");
        }
    }
    const double t_first = s.epochs.front().t_n;
    const double t_last = s.epochs.back().t_n;
    if (t_last - t_first > 0.0 || !s.omega_profile.empty()) {
        if (s.omega_profile.empty()) {
            fail("scenario: omega_profile must cover the epoch span");
        }
        for (std::size_t i = 0; i + 1 < s.omega_profile.size(); ++i) {
            const double gap =
                s.omega_profile[i + 1].t_start - s.omega_profile[i].t_end;
            if (std::abs(gap) > kTimeTol) {
                fail("scenario: omega_profile segments must be contiguous");
            }
        }
        if (s.omega_profile.front().t_start > t_first + kTimeTol ||
            s.omega_profile.back().t_end < t_last - kTimeTol) {
            fail("scenario: omega_profile must cover [first epoch, last epoch]");
        }
    }
}

Scenario parse_scenario(const json& j) {
    check_known_keys(j,
                     {"seed", "mode", "refs", "epochs", "omega_profile",
                      "true_initial_attitude", "n_trials"},
                     "scenario");
    Scenario s;
    s.seed = parse_seed(require(j, "seed", "scenario"), "scenario.seed");
    const json& mode = require(j, "mode", "scenario");
    if (!mode.is_string()) {
        fail("scenario.mode: expected a string");
    }
    const std::string mode_str = mode.get<std::string>();
    if (mode_str == "static_wahba") {
        s.mode = ScenarioMode::static_wahba;
    } else if (mode_str == "dynamic_iekf") {
        s.mode = ScenarioMode::dynamic_iekf;
    } else {
        fail("scenario.mode: expected \"static_wahba\" or \"dynamic_iekf\"");
    }
    s.n_trials = parse_count(require(j, "n_trials", "scenario"), "scenario.n_trials");
    if (j.contains("true_initial_attitude")) {
        s.true_initial_attitude =
            parse_vec3(j.at("true_initial_attitude"), "scenario.true_initial_attitude");
    }
    if (j.contains("refs")) {
        const json& refs = j.at("refs");
        if (!refs.is_array()) {
            fail("scenario.refs: expected an array");
        }
        for (std::size_t i = 0; i < refs.size(); ++i) {
            s.refs.push_back(
                parse_reference(refs[i], "scenario.refs[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("epochs")) {
        const json& epochs = j.at("epochs");
        if (!epochs.is_array()) {
            fail("scenario.epochs: expected an array");
        }
        for (std::size_t i = 0; i < epochs.size(); ++i) {
            s.epochs.push_back(
                parse_epoch(epochs[i], "scenario.epochs[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("omega_profile")) {
        const json& segs = j.at("omega_profile");
        if (!segs.is_array()) {
            fail("scenario.omega_profile: expected an array");
        }
        for (std::size_t i = 0; i < segs.size(); ++i) {
            s.omega_profile.push_back(parse_segment(
                segs[i], "scenario.omega_profile[" + std::to_string(i) + "]"));
        }
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open scenario file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail("scenario file " + path + ": " + e.what());
    }
    return parse_scenario(j);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    json j;
    j["seed"] = s.seed;
    j["mode"] = s.mode == ScenarioMode::static_wahba ? "static_wahba" : "dynamic_iekf";
    j["n_trials"] = s.n_trials;
    j["true_initial_attitude"] = {s.true_initial_attitude.x(),
                                  s.true_initial_attitude.y(),
                                  s.true_initial_attitude.z()};
    if (s.mode == ScenarioMode::static_wahba) {
        json refs = json::array();
        for (const Reference& ref : s.refs) {
            refs.push_back({{"d", {ref.d.x(), ref.d.y(), ref.d.z()}},
                            {"sigma", ref.sigma}});
        }
        j["refs"] = refs;
    } else {
        json epochs = json::array();
        for (const EpochSpec& e : s.epochs) {
            epochs.push_back({{"t_n", e.t_n},
                              {"d0", {e.d0.x(), e.d0.y(), e.d0.z()}},
                              {"d1", {e.d1.x(), e.d1.y(), e.d1.z()}},
                              {"sigma0", e.sigma0},
                              {"sigma1", e.sigma1}});
        }
        j["epochs"] = epochs;
        json segs = json::array();
        for (const OmegaSegment& seg : s.omega_profile) {
            segs.push_back({{"t_start", seg.t_start},
                            {"t_end", seg.t_end},
                            {"omega", {seg.omega.x(), seg.omega.y(), seg.omega.z()}}});
        }
        j["omega_profile"] = segs;
    }
    return j;
}

Vec3 omega_at(const std::vector<OmegaSegment>& profile, double t) {
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const OmegaSegment& seg = profile[i];
        const bool last = (i + 1 == profile.size());
        if (t >= seg.t_start - kTimeTol &&
            (t < seg.t_end || (last && t <= seg.t_end + kTimeTol))) {
            return seg.omega;
        }
    }
    throw InvalidScenarioError("omega_at: t = " + std::to_string(t) +
                               " is outside the omega profile");
}

} // namespace icrb
