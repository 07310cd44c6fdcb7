#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "sentinel/power.hpp"

using namespace sentinel::power;

namespace {

// The bench measurements: (deep sleep interval s, average mW).
constexpr std::array<std::pair<double, double>, 3> kMeasuredAverages{
    {{10.0, 424.87}, {30.0, 378.00}, {60.0, 327.21}}};

}  // namespace

TEST_CASE("average power limits") {
    CycleModel sleep_only{0.0, 10.0, 250.0};
    for (double t : {0.0, 1.0, 100.0, 10000.0}) {
        if (t == 0.0) {
            CHECK(average_power_mW(sleep_only, t) == doctest::Approx(0.0));
        } else {
            // With no uptime energy the cycle converges to the sleep power.
            CHECK(average_power_mW(sleep_only, t) <= 250.0);
        }
    }
    CycleModel m{8000.0, 15.0, 250.0};
    CHECK(average_power_mW(m, 0.0) == doctest::Approx(8000.0 / 15.0));
    // Long-sleep limit approaches the sleep floor.
    CHECK(average_power_mW(m, 1e6) == doctest::Approx(250.0).epsilon(0.01));

    CycleModel pure_sleep{250.0 * 5.0, 5.0, 250.0};  // uptime indistinguishable from sleep
    CHECK(average_power_mW(pure_sleep, 42.0) == doctest::Approx(250.0));
}

TEST_CASE("fit recovers a synthetic cycle model exactly") {
    const CycleModel truth{8000.0, 15.0, 250.0};
    std::vector<std::pair<double, double>> obs;
    for (double t : {10.0, 30.0, 60.0}) {
        obs.emplace_back(t, average_power_mW(truth, t));
    }
    const CycleModel fitted = fit_cycle_model(obs);
    CHECK(fitted.uptime_energy_mJ == doctest::Approx(truth.uptime_energy_mJ).epsilon(1e-6));
    CHECK(fitted.uptime_s == doctest::Approx(truth.uptime_s).epsilon(1e-6));
    CHECK(fitted.sleep_mW == doctest::Approx(truth.sleep_mW).epsilon(1e-6));

    // Over-determined fit with a consistent fourth point also recovers it.
    obs.emplace_back(120.0, average_power_mW(truth, 120.0));
    const CycleModel fitted4 = fit_cycle_model(obs);
    CHECK(fitted4.sleep_mW == doctest::Approx(truth.sleep_mW).epsilon(1e-6));
}

TEST_CASE("fit reproduces the measured averages within half a percent") {
    const CycleModel m = fit_cycle_model(kMeasuredAverages);
    for (const auto& [interval, avg] : kMeasuredAverages) {
        CHECK(average_power_mW(m, interval) == doctest::Approx(avg).epsilon(0.005));
    }
    CHECK(m.uptime_s > 0.0);
    CHECK(m.sleep_mW > 0.0);
}

TEST_CASE("degenerate observations raise SingularSystem") {
    std::vector<std::pair<double, double>> two{{10.0, 424.87}, {30.0, 378.00}};
    CHECK_THROWS_AS(fit_cycle_model(two), SingularSystem);

    std::vector<std::pair<double, double>> repeated{
        {10.0, 424.87}, {10.0, 424.87}, {10.0, 424.87}};
    CHECK_THROWS_AS(fit_cycle_model(repeated), SingularSystem);
}

TEST_CASE("average power decreases with longer sleep") {
    const CycleModel m = fit_cycle_model(kMeasuredAverages);
    REQUIRE(m.sleep_mW < m.uptime_energy_mJ / m.uptime_s);
    double prev = average_power_mW(m, 1.0);
    for (int t = 2; t <= 600; ++t) {
        const double cur = average_power_mW(m, t);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("battery lifetime arithmetic") {
    CHECK(lifetime_hours(32.721, 327.21) == doctest::Approx(100.0));
    // Capacity back-computed from the 330 h runtime figure.
    CHECK(lifetime_hours(107.98, 327.21) == doctest::Approx(330.0).epsilon(0.001));
    // Sleep-only draw lands near the 450 h ballpark.
    CHECK(lifetime_hours(107.98, 250.0) == doctest::Approx(450.0).epsilon(0.10));
    // Doubling capacity doubles hours.
    CHECK(lifetime_hours(2.0 * 107.98, 327.21) ==
          doctest::Approx(2.0 * lifetime_hours(107.98, 327.21)));
}

TEST_CASE("energy ledger accumulates per stage") {
    StageProfile profile;
    EnergyLedger ledger;
    ledger.add(Stage::Setup, 10.0, profile);
    CHECK(ledger.stage_mJ(Stage::Setup) == doctest::Approx(4250.0));
    ledger.add(Stage::Sleep, 60.0, profile);
    CHECK(ledger.stage_mJ(Stage::Sleep) == doctest::Approx(15000.0));
    CHECK(ledger.total_mJ() == doctest::Approx(19250.0));
    CHECK(ledger.total_s() == doctest::Approx(70.0));

    // Concatenating two stage sequences sums the ledgers.
    EnergyLedger a;
    a.add(Stage::Listen, 5.0, profile);
    a.add(Stage::Sleep, 10.0, profile);
    EnergyLedger b;
    b.add(Stage::Listen, 2.0, profile);
    b.add(Stage::WifiPeak, 0.5, profile);
    EnergyLedger merged = a;
    merged.merge(b);
    CHECK(merged.total_mJ() == doctest::Approx(a.total_mJ() + b.total_mJ()));
    CHECK(merged.stage_s(Stage::Listen) == doctest::Approx(7.0));

    EnergyLedger empty;
    CHECK(empty.average_mW() == 0.0);
}

TEST_CASE("narrative stage profile approximates the measured averages") {
    StageProfile p;
    for (const auto& [interval, avg] : kMeasuredAverages) {
        EnergyLedger ledger;
        ledger.add(Stage::Setup, p.setup_s, p);
        ledger.add(Stage::WifiPeak, p.peak_s, p);
        ledger.add(Stage::Listen, p.listen_s, p);
        ledger.add(Stage::Sleep, interval, p);
        CHECK(ledger.average_mW() == doctest::Approx(avg).epsilon(0.15));
    }
}
