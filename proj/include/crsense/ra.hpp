#pragma once

#include "crsense/belief.hpp"

#include <array>
#include <optional>
#include <vector>

namespace crsense {

/// Per-user scheduling weight and long-term power budget.
struct UserConfig {
    double weight = 1.0;    ///< beta_m > 0, user priority
    double power_cap = 1.0; ///< average-power budget
};

/// Noise-normalized power gains, gains[k][m] for channel k, user m.
struct LinkState {
    std::vector<std::vector<double>> gains;
};

/// Lagrange multipliers: power prices per user, interference prices per
/// channel. Both stay nonnegative.
struct DualState {
    std::vector<double> power_price;        ///< pi_m
    std::vector<double> interference_price; ///< theta_k
};

void validate(const UserConfig& u);
void validate(const LinkState& l);
void validate(const DualState& d);

/// Power, Shannon rate at that power, and the rate/power trade-off value
/// beta*C - pi*p for one (channel, user) pair.
struct PowerRateIri {
    double power = 0.0;
    double rate = 0.0;
    double iri = 0.0;
};

struct UserIri {
    double power = 0.0;
    double rate = 0.0;
    double su_iri = 0.0;   ///< excludes the interference price term
    double full_iri = 0.0; ///< su_iri - theta_k * post_belief
};

struct ChannelIri {
    std::vector<UserIri> users;
    double su_best = 0.0;                    ///< max_m su_iri
    std::array<double, 2> iri_vector{0, 0};  ///< [su_best, su_best - theta_k]
    std::optional<int> winner;               ///< argmax of full_iri when positive
    double channel_iri = 0.0;                ///< [max_m full_iri]_+
};

struct IriBundle {
    std::vector<ChannelIri> channels;
};

/// Per-slot decisions: which channels are sensed, who (if anyone) accesses
/// each channel, and the effective power of the winner. At most one user
/// per channel; power is zero on channels with no winner.
struct SlotDecision {
    std::vector<bool> sense;
    std::vector<std::optional<int>> winner;
    std::vector<double> power;
};

/// Closed-form maximizer of beta*log2(1 + h p / gap) - pi*p over p >= 0:
/// [beta/(pi ln 2) - gap/h]_+, zero when h == 0.
/// Throws std::domain_error when pi == 0 with h > 0 (no finite maximizer).
double optimal_power(double gain, double beta, double pi, double gamma_gap);

/// optimal_power plus the rate and trade-off value it achieves.
/// The iri is nonnegative and zero exactly when the power is zero.
PowerRateIri su_iri(double gain, double beta, double pi, double gamma_gap);

/// Secondary-network half of the bundle: per-user power/rate/su_iri and
/// the per-channel best, independent of any belief.
std::vector<ChannelIri> compute_su_table(const LinkState& link,
                                         const std::vector<UserConfig>& users,
                                         const DualState& duals, double gamma_gap);

/// Fill in the belief-dependent half: full iri, iri vector, winner and
/// channel iri. The [max_m full_iri]_+ and [l^T b]_+ routes are both
/// computed and cross-checked.
void complete_iri_bundle(IriBundle& bundle, const DualState& duals,
                         const std::vector<Belief>& post_beliefs);

/// Eqs of the per-slot optimal RA for fixed multipliers, end to end.
IriBundle compute_iri_bundle(const LinkState& link, const std::vector<UserConfig>& users,
                             const DualState& duals, const std::vector<Belief>& post_beliefs,
                             double gamma_gap);

/// Turn a completed bundle into the slot's scheduling decision.
/// The sense field is left unset (all false); sensing is decided upstream.
SlotDecision allocate(const IriBundle& bundle);

} // namespace crsense
