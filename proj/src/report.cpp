#include "icrb/report.hpp"

#include <json.hpp>

#include "icrb/errors.hpp"

namespace icrb {
namespace {

using nlohmann::json;

json mat3_to_json(const Mat3& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    }
    return rows;
}

Mat3 mat3_from_json(const json& v, const char* field) {
    if (!v.is_array() || v.size() != 3) {
        throw InvalidScenarioError(std::string("report.") + field +
                                   ": expected a 3x3 array");
    }
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i) {
        const json& row = v[i];
        if (!row.is_array() || row.size() != 3) {
            throw InvalidScenarioError(std::string("report.") + field +
                                       ": expected a 3x3 array");
        }
        for (std::size_t k = 0; k < 3; ++k) {
            if (!row[k].is_number()) {
                throw InvalidScenarioError(std::string("report.") + field +
                                           ": expected numeric entries");
            }
            m(static_cast<int>(i), static_cast<int>(k)) = row[k].get<double>();
        }
    }
    return m;
}

const json& require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw InvalidScenarioError(std::string("report: missing field \"") + key +
                                   "\"");
    }
    return *it;
}

} // namespace

namespace {

bool exact_eq(const Mat3& a, const Mat3& b) {
    return (a.array() == b.array()).all();
}

} // namespace

bool operator==(const Report& a, const Report& b) {
    const bool iekf_match =
        a.iekf_p.has_value() == b.iekf_p.has_value() &&
        (!a.iekf_p.has_value() || exact_eq(*a.iekf_p, *b.iekf_p));
    // timing is measurement metadata, not run content; two identical runs
    // never agree on it, so it stays out of the comparison.
    return exact_eq(a.empirical_p, b.empirical_p) &&
           exact_eq(a.bound_first_order, b.bound_first_order) &&
           exact_eq(a.bound_curvature, b.bound_curvature) && iekf_match &&
           (a.bias.array() == b.bias.array()).all() &&
           a.trial_count == b.trial_count &&
           a.rejected_trials == b.rejected_trials &&
           a.loewner_ok == b.loewner_ok;
}

json report_to_json(const Report& r) {
    json j;
    j["empirical_p"] = mat3_to_json(r.empirical_p);
    j["bound_first_order"] = mat3_to_json(r.bound_first_order);
    j["bound_curvature"] = mat3_to_json(r.bound_curvature);
    j["iekf_p"] = r.iekf_p.has_value() ? mat3_to_json(*r.iekf_p) : json(nullptr);
    j["bias"] = {r.bias.x(), r.bias.y(), r.bias.z()};
    j["trial_count"] = r.trial_count;
    j["rejected_trials"] = r.rejected_trials;
    j["loewner_ok"] = r.loewner_ok;
    j["timing"] = r.timing;
    return j;
}

Report report_from_json(const json& j) {
    if (!j.is_object()) {
        throw InvalidScenarioError("report: expected a JSON object");
    }
    static const char* const known[] = {
        "empirical_p", "bound_first_order", "bound_curvature", "iekf_p",
        "bias",        "trial_count",       "rejected_trials", "loewner_ok",
        "timing"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : known) {
            if (item.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw InvalidScenarioError("report: unknown field \"" + item.key() +
                                       "\"");
        }
    }
    Report r;
    r.empirical_p = mat3_from_json(require(j, "empirical_p"), "empirical_p");
    r.bound_first_order =
        mat3_from_json(require(j, "bound_first_order"), "bound_first_order");
    r.bound_curvature =
        mat3_from_json(require(j, "bound_curvature"), "bound_curvature");
    const json& iekf = require(j, "iekf_p");
    if (!iekf.is_null()) {
        r.iekf_p = mat3_from_json(iekf, "iekf_p");
    }
    const json& bias = require(j, "bias");
    if (!bias.is_array() || bias.size() != 3) {
        throw InvalidScenarioError("report.bias: expected an array of 3 numbers");
    }
    r.bias = Vec3(bias[0].get<double>(), bias[1].get<double>(), bias[2].get<double>());
    r.trial_count = require(j, "trial_count").get<std::size_t>();
    r.rejected_trials = require(j, "rejected_trials").get<std::size_t>();
    r.loewner_ok = require(j, "loewner_ok").get<bool>();
    r.timing = require(j, "timing").get<double>();
    return r;
}

std::string report_to_canonical_string(const Report& r) {
    Report canonical = r;
    canonical.timing = 0.0;
    return report_to_json(canonical).dump(2) + "\n";
}

} // namespace icrb
