#include "crsense/ra.hpp"
#include "crsense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crsense {

namespace {
constexpr double kLn2 = 0.6931471805599453;
} // namespace

double ChannelModel::mean_gain() const { return std::pow(10.0, snr_db / 10.0); }

void validate(const ChannelModel& c) {
    validate(c.transition);
    validate(c.sensor);
    if (c.sensing_cost < 0.0)
        throw std::invalid_argument("sensing cost must be nonnegative");
    if (!(c.interference_cap > 0.0 && c.interference_cap <= 1.0))
        throw std::invalid_argument("interference cap must lie in (0,1]");
}

void validate(const UserConfig& u) {
    if (u.weight <= 0.0) throw std::invalid_argument("user weight must be positive");
    if (u.power_cap <= 0.0) throw std::invalid_argument("power cap must be positive");
}

void validate(const LinkState& l) {
    for (const auto& row : l.gains)
        for (double h : row)
            if (!(h >= 0.0) || !std::isfinite(h))
                throw std::invalid_argument("gains must be finite and nonnegative");
}

void validate(const DualState& d) {
    for (double p : d.power_price)
        if (!(p >= 0.0)) throw std::invalid_argument("power prices must be nonnegative");
    for (double t : d.interference_price)
        if (!(t >= 0.0)) throw std::invalid_argument("interference prices must be nonnegative");
}

double optimal_power(double gain, double beta, double pi, double gamma_gap) {
    if (gain < 0.0 || beta <= 0.0 || pi < 0.0 || gamma_gap <= 0.0)
        throw std::invalid_argument("optimal_power: bad inputs");
    if (gain == 0.0) return 0.0;
    if (pi == 0.0)
        throw std::domain_error("optimal_power: unbounded objective with pi = 0 and positive gain");
    const double waterlevel = beta / (pi * kLn2);
    const double floor = gamma_gap / gain;
    return waterlevel > floor ? waterlevel - floor : 0.0;
}

PowerRateIri su_iri(double gain, double beta, double pi, double gamma_gap) {
    PowerRateIri out;
    out.power = optimal_power(gain, beta, pi, gamma_gap);
    if (out.power > 0.0) {
        out.rate = std::log2(1.0 + gain * out.power / gamma_gap);
        out.iri = beta * out.rate - pi * out.power;
        if (out.iri < 0.0) out.iri = 0.0; // maximized value of a map that is 0 at p=0
    }
    return out;
}

std::vector<ChannelIri> compute_su_table(const LinkState& link,
                                         const std::vector<UserConfig>& users,
                                         const DualState& duals, double gamma_gap) {
    const std::size_t n_users = users.size();
    if (duals.power_price.size() != n_users)
        throw std::invalid_argument("compute_su_table: one power price per user required");
    std::vector<ChannelIri> table(link.gains.size());
    for (std::size_t k = 0; k < link.gains.size(); ++k) {
        const auto& row = link.gains[k];
        if (row.size() != n_users)
            throw std::invalid_argument("compute_su_table: gain row size mismatch");
        auto& ch = table[k];
        ch.users.resize(n_users);
        ch.su_best = 0.0;
        for (std::size_t m = 0; m < n_users; ++m) {
            const PowerRateIri pri =
                su_iri(row[m], users[m].weight, duals.power_price[m], gamma_gap);
            ch.users[m].power = pri.power;
            ch.users[m].rate = pri.rate;
            ch.users[m].su_iri = pri.iri;
            if (pri.iri > ch.su_best) ch.su_best = pri.iri;
        }
    }
    return table;
}

void complete_iri_bundle(IriBundle& bundle, const DualState& duals,
                         const std::vector<Belief>& post_beliefs) {
    if (bundle.channels.size() != duals.interference_price.size() ||
        bundle.channels.size() != post_beliefs.size())
        throw std::invalid_argument("complete_iri_bundle: dimension mismatch");
    for (std::size_t k = 0; k < bundle.channels.size(); ++k) {
        auto& ch = bundle.channels[k];
        const double theta = duals.interference_price[k];
        const double belief = post_beliefs[k].busy_prob;
        ch.iri_vector = {ch.su_best, ch.su_best - theta};

        double best = -std::numeric_limits<double>::infinity();
        ch.winner.reset();
        for (std::size_t m = 0; m < ch.users.size(); ++m) {
            ch.users[m].full_iri = ch.users[m].su_iri - theta * belief;
            // strict argmax; ties resolved to the lowest user index
            if (ch.users[m].full_iri > best) {
                best = ch.users[m].full_iri;
                ch.winner = static_cast<int>(m);
            }
        }
        if (!(best > 0.0)) ch.winner.reset();
        ch.channel_iri = best > 0.0 ? best : 0.0;

        // The dot-product route through the iri vector must agree.
        const double dot = ch.iri_vector[0] * (1.0 - belief) + ch.iri_vector[1] * belief;
        const double alt = dot > 0.0 ? dot : 0.0;
        const double scale = std::max({1.0, std::abs(ch.channel_iri), std::abs(alt)});
        if (std::abs(alt - ch.channel_iri) > 1e-12 * scale)
            throw std::logic_error("channel iri disagreement between argmax and dot-product forms");
    }
}

IriBundle compute_iri_bundle(const LinkState& link, const std::vector<UserConfig>& users,
                             const DualState& duals, const std::vector<Belief>& post_beliefs,
                             double gamma_gap) {
    IriBundle bundle;
    bundle.channels = compute_su_table(link, users, duals, gamma_gap);
    complete_iri_bundle(bundle, duals, post_beliefs);
    return bundle;
}

SlotDecision allocate(const IriBundle& bundle) {
    SlotDecision d;
    const std::size_t n = bundle.channels.size();
    d.sense.assign(n, false);
    d.winner.resize(n);
    d.power.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ch = bundle.channels[k];
        d.winner[k] = ch.winner;
        if (ch.winner)
            d.power[k] = ch.users[static_cast<std::size_t>(*ch.winner)].power;
    }
    return d;
}

} // namespace crsense
