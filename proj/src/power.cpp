#include "sentinel/power.hpp"

#include <cmath>
#include <numeric>

namespace sentinel::power {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Setup:
            return "setup";
        case Stage::WifiPeak:
            return "wifi_peak";
        case Stage::Listen:
            return "listen";
        case Stage::Active:
            return "active";
        case Stage::Sleep:
            return "sleep";
    }
    return "unknown";
}

double StageProfile::power_mW(Stage s) const {
    switch (s) {
        case Stage::Setup:
            return setup_mW;
        case Stage::WifiPeak:
            return wifi_peak_mW;
        case Stage::Listen:
            return listen_mW;
        case Stage::Active:
            return active_mW;
        case Stage::Sleep:
            return sleep_mW;
    }
    return 0.0;
}

double average_power_mW(const CycleModel& m, double sleep_interval_s) {
    return (m.uptime_energy_mJ + m.sleep_mW * sleep_interval_s) / (m.uptime_s + sleep_interval_s);
}

namespace {

// Solves the symmetric 3x3 system a*x = b by Gaussian elimination with
// partial pivoting. Throws SingularSystem on a (near-)zero pivot.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::fabs(a[pivot][col]) < 1e-12) {
            throw SingularSystem("degenerate cycle-model observations");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 3; ++c) {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    return x;
}

}  // namespace

CycleModel fit_cycle_model(std::span<const std::pair<double, double>> observations) {
    if (observations.size() < 3) {
        throw SingularSystem("cycle-model fit needs at least three observations");
    }
    // Each observation (T, avg) gives the linear equation
    //   E_up + T * P_sleep - avg * T_up = avg * T
    // in the unknowns x = (E_up, P_sleep, T_up). Assemble normal equations
    // so any number of observations reduces to one 3x3 solve.
    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (const auto& [interval_s, avg_mW] : observations) {
        const std::array<double, 3> row{1.0, interval_s, -avg_mW};
        const double rhs = avg_mW * interval_s;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    const auto x = solve3(ata, atb);
    return CycleModel{x[0], x[2], x[1]};
}

double lifetime_hours(double capacity_Wh, double avg_mW) {
    return capacity_Wh * 1000.0 / avg_mW;
}

void EnergyLedger::add(Stage stage, double duration_s, const StageProfile& profile) {
    const auto i = static_cast<std::size_t>(stage);
    mj_[i] += duration_s * profile.power_mW(stage);
    secs_[i] += duration_s;
}

double EnergyLedger::total_mJ() const {
    return std::accumulate(mj_.begin(), mj_.end(), 0.0);
}

double EnergyLedger::total_s() const {
    return std::accumulate(secs_.begin(), secs_.end(), 0.0);
}

double EnergyLedger::average_mW() const {
    const double t = total_s();
    return t > 0.0 ? total_mJ() / t : 0.0;
}

void EnergyLedger::merge(const EnergyLedger& other) {
    for (std::size_t i = 0; i < kStageCount; ++i) {
        mj_[i] += other.mj_[i];
        secs_[i] += other.secs_[i];
    }
}

}  // namespace sentinel::power
