#pragma once

#include "ura/amp.hpp"
#include "ura/analysis.hpp"
#include "ura/channel.hpp"
#include "ura/collision_model.hpp"
#include "ura/mud.hpp"
#include "ura/pilots.hpp"
#include "ura/polar.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ura {

enum class SupportRule { known_active, threshold };
enum class GammaSource { prior, estimate };

struct ExperimentConfig {
    std::string name = "custom";

    // frame
    int pilot_length = 1152;  // n_p
    int data_length = 2048;   // n_d
    int message_bits = 100;   // B
    int pilot_bits = 16;      // J
    int antennas = 50;        // M
    int active_users = 100;   // K_a
    double n0 = 1.0;
    double p_pilot = 0.01;
    double p_data = 0.01;
    /// When set, overrides both powers: P = Eb/N0 * B * N0 / (n_p + n_d).
    std::optional<double> ebn0_db;
    /// `ebn0_db = auto`: the analysis-predicted Eb/N0 (lmmse model) plus this margin.
    std::optional<double> ebn0_margin_db;

    // campaign
    int trials = 100;
    std::uint64_t campaign_seed = 1;
    /// Seed of the pilot book; defaults to campaign_seed.
    std::optional<std::uint64_t> pilot_seed;

    // receiver
    int amp_max_iters = 50;
    double amp_damping = 0.7;
    double amp_tolerance = 1e-6;
    SupportRule support_rule = SupportRule::known_active;
    double threshold = 0.0;  // on P_pilot * gamma_hat
    GammaSource gamma_source = GammaSource::prior;
    LlrNoise llr_noise = LlrNoise::analytic;
    bool dedup = true;
    /// Truncate or pad the output list to exactly K_a entries.
    bool fixed_list_size = false;

    // code
    int crc_bits = 16;
    int list_size = 32;
    CheckNode check_node = CheckNode::exact;
    /// Construction SNR (dB, per real dimension); defaults to the SINR the
    /// normal approximation requires at `error_prob`.
    std::optional<double> design_snr_db;
    double error_prob = 0.05;

    // analysis sweep
    std::vector<int> ka_grid{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 1100};
    std::vector<int> m_grid{25, 50, 100};
    int pilot_draws = 10;
    bool collision_adjust = true;

    // collision model sweep
    double collide_snr_db = -10.0;
    int collide_antennas = 50;
    std::vector<double> sigma_est_db{-20, -18, -16, -14, -12, -10, -8, -6, -4, -2, 0};
    /// Design SNR of the collision-model code; defaults to M * SNR.
    std::optional<double> collide_design_snr_db;

    std::int64_t pool_size() const { return std::int64_t{1} << pilot_bits; }
    int block_length() const { return 2 * data_length; }
    int payload_bits() const { return message_bits - pilot_bits; }
    int frame_length() const { return pilot_length + data_length; }
    double power_pilot() const;
    double power_data() const;
    double ebn0() const;  // linear

    void validate() const;
    SceneParams scene_params() const;
    AmpConfig amp_config() const;
    PolarCodeSpec polar_code() const;
    double design_snr() const;  // linear
    PilotBook pilot_book() const;
};

struct TrialReport {
    int trial = 0;
    std::vector<Bits> output_list;  // sorted
    int n_md = 0;
    int n_fa = 0;
    int list_size = 0;
    int active_users = 0;
    // diagnostics
    double support_f1 = 0.0;
    int missed_pilots = 0;     // true pilots absent from the detected support
    int decoded_rows = 0;      // detected rows with at least one CRC-valid candidate
    int collisions = 0;        // user pairs sharing a pilot
    int amp_iterations = 0;
    bool amp_converged = false;
    int padded = 0;            // entries added to reach K_a under fixed_list_size
    std::string failure;       // empty unless a stage threw

    /// false-alarm fraction n_fa / |L|, 0 for an empty list
    double fa_fraction() const { return list_size ? static_cast<double>(n_fa) / list_size : 0.0; }
    bool list_identity_holds() const { return list_size == n_fa + active_users - n_md; }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for `successes` out of `n` at ~95% confidence.
Interval wilson_interval(double successes, double n, double z = 1.959963984540054);

struct CampaignReport {
    ExperimentConfig config;
    std::vector<TrialReport> trials;
    double p_md = 0.0;
    double p_fa = 0.0;
    Interval p_md_ci;
    Interval p_fa_ci;
    double error_rate() const { return p_md + p_fa; }
    /// Share of misdetections whose pilot the activity detector missed.
    double p_md_activity = 0.0;
    bool identities_hold = true;
};

/// Output list assembly shared by run_trial and tests: prefix each candidate
/// payload with the J-bit pilot index and insert into the list.
struct ListAssembly {
    std::vector<Bits> list;
    void add(std::int64_t pilot, int pilot_bits, const Bits& payload);
};

/// Full pipeline for one realization: scene, signals, AMP, LMMSE, MRC, SCL.
TrialReport run_trial(const ExperimentConfig& cfg, const PilotBook& book, const PolarCodeSpec& code, int trial_index);
/// Same pipeline on a given scene (fixtures with forced collisions).
TrialReport run_trial_on_scene(const ExperimentConfig& cfg, const PilotBook& book, const PolarCodeSpec& code,
                               const Scene& scene, Rng& rng, int trial_index = 0);

/// Required Eb/N0 predicted for the config's own (K_a, M, frame) point.
EbN0Result predicted_ebn0(const ExperimentConfig& cfg, MseModel model);
/// Replaces an automatic power setting by the concrete Eb/N0.
ExperimentConfig resolve_power(const ExperimentConfig& cfg);

/// Runs `trials` independent realizations; resolves `ebn0_db = auto` first.
CampaignReport run_campaign(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

/// Per-trial CSV with a versioned header comment; deterministic given the config.
void write_campaign_csv(std::ostream& os, const CampaignReport& report);
std::string campaign_summary(const CampaignReport& report);

struct CurvePoint {
    int active_users;
    int antennas;
    MseModel model;
    EbN0Result result;
};

/// Required Eb/N0 over the config's K_a x M grid for both MSE models.
std::vector<CurvePoint> analysis_curves(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points);

/// Two-user collision-model sweep over the config's sigma_est grid.
std::vector<CollisionPoint> collision_curve(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
PolarCodeSpec collision_code(const ExperimentConfig& cfg);
void write_collision_csv(std::ostream& os, const std::vector<CollisionPoint>& points);

}  // namespace ura
