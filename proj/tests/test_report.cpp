#include <string>

#include <doctest.h>
#include <json.hpp>

#include "icrb/report.hpp"

using namespace icrb;
using nlohmann::json;

namespace {

Report sample_report(bool with_iekf) {
    Report r;
    r.empirical_p << 1.0, 0.1, 0.0, 0.1, 2.0, -0.2, 0.0, -0.2, 3.0;
    r.bound_first_order = 0.5 * Mat3::Identity();
    r.bound_curvature << 0.49, 0.0, 0.01, 0.0, 0.48, 0.0, 0.01, 0.0, 0.47;
    if (with_iekf) {
        r.iekf_p = 0.25 * Mat3::Identity();
    }
    r.bias = Vec3(1e-3, -2e-3, 5e-4);
    r.trial_count = 10000;
    r.rejected_trials = 2;
    r.loewner_ok = true;
    r.timing = 12.34;
    return r;
}

} // namespace

TEST_CASE("report serialization round-trips exactly") {
    for (bool with_iekf : {false, true}) {
        const Report r = sample_report(with_iekf);
        const Report back = report_from_json(report_to_json(r));
        CHECK(back == r);
        CHECK(back.iekf_p.has_value() == with_iekf);
    }
}

TEST_CASE("iekf_p serializes as null for static runs") {
    const json j = report_to_json(sample_report(false));
    CHECK(j.at("iekf_p").is_null());
    const json jd = report_to_json(sample_report(true));
    CHECK(jd.at("iekf_p").is_array());
}

TEST_CASE("canonical string ignores wall time") {
    Report a = sample_report(true);
    Report b = a;
    b.timing = 987.0;
    const std::string sa = report_to_canonical_string(a);
    const std::string sb = report_to_canonical_string(b);
    CHECK(sa == sb);
    CHECK(!sa.empty());
    CHECK(sa.back() == '\n');
    // The zeroed timing is what appears on the wire.
    const json parsed = json::parse(sa);
    CHECK(parsed.at("timing").get<double>() == 0.0);
}

TEST_CASE("report parsing validates shape") {
    json j = report_to_json(sample_report(true));
    j.erase("bias");
    CHECK_THROWS_AS(report_from_json(j), InvalidScenarioError);

    json j2 = report_to_json(sample_report(true));
    j2["empirical_p"] = {1, 2, 3};
    CHECK_THROWS_AS(report_from_json(j2), InvalidScenarioError);

    json j3 = report_to_json(sample_report(true));
    j3["unknown"] = 5;
    CHECK_THROWS_AS(report_from_json(j3), InvalidScenarioError);
}
