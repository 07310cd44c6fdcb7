#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <utility>

namespace sentinel::power {

enum class Stage : std::uint8_t { Setup, WifiPeak, Listen, Active, Sleep };

inline constexpr std::size_t kStageCount = 5;

const char* stage_name(Stage s);

// Stage powers and nominal durations of one duty cycle, as measured on the
// bench: boot setup, the Wi-Fi activation burst, the listen window, active
// voting, and deep sleep.
struct StageProfile {
    double setup_mW = 425.0;
    double setup_s = 10.0;
    double wifi_peak_mW = 2000.0;
    double peak_s = 0.5;
    double listen_mW = 750.0;
    double listen_s = 5.0;
    double active_mW = 750.0;
    double sleep_mW = 250.0;

    double power_mW(Stage s) const;
};

// Three-parameter cycle abstraction: a fixed uptime block followed by a
// sleep phase of configurable length.
struct CycleModel {
    double uptime_energy_mJ = 0.0;
    double uptime_s = 0.0;
    double sleep_mW = 0.0;
};

struct SingularSystem : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mean power over one cycle with the given sleep interval. At zero sleep
// this is the uptime-only average.
double average_power_mW(const CycleModel& m, double sleep_interval_s);

// Recovers a CycleModel from (sleep_interval_s, average_mW) observations.
// Exact for three points with distinct intervals, least squares beyond.
CycleModel fit_cycle_model(std::span<const std::pair<double, double>> observations);

double lifetime_hours(double capacity_Wh, double avg_mW);

// Accumulated energy per duty-cycle stage for one node.
class EnergyLedger {
  public:
    void add(Stage stage, double duration_s, const StageProfile& profile);

    double stage_mJ(Stage s) const { return mj_[static_cast<std::size_t>(s)]; }
    double stage_s(Stage s) const { return secs_[static_cast<std::size_t>(s)]; }
    double total_mJ() const;
    double total_s() const;
    // Total energy over total time; zero-duration ledgers average to zero.
    double average_mW() const;

    void merge(const EnergyLedger& other);

  private:
    std::array<double, kStageCount> mj_{};
    std::array<double, kStageCount> secs_{};
};

}  // namespace sentinel::power
