#include "spikesolve/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spikesolve {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMergeTolerance = 1e-12;

double canonical_phase(double phase) {
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Domain domain, std::vector<Atom> atoms)
    : domain_(domain) {
    atoms_.reserve(atoms.size());
    for (Atom a : atoms) {
        if (!std::isfinite(a.t) || !std::isfinite(a.amplitude) ||
            !std::isfinite(a.phase)) {
            throw DomainError("measure atom has non-finite entries");
        }
        if (!domain_.contains(a.t)) {
            throw DomainError("atom location outside the domain");
        }
        if (a.amplitude == 0.0) continue;
        if (a.amplitude < 0.0) {
            // polar canonical form: fold the sign into the phase
            a.amplitude = -a.amplitude;
            a.phase += kTwoPi / 2.0;
        }
        a.t = domain_.canonical(a.t);
        a.phase = canonical_phase(a.phase);
        atoms_.push_back(a);
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
            if (domain_.distance(atoms_[i].t, atoms_[j].t) < kMergeTolerance) {
                throw DomainError(
                    "atom locations closer than 1e-12; merge explicitly before "
                    "constructing the measure");
            }
        }
    }
}

DiscreteMeasure DiscreteMeasure::from_complex_weights(
    Domain domain, const std::vector<double>& locations,
    const std::vector<std::complex<double>>& weights) {
    if (locations.size() != weights.size()) {
        throw DomainError("locations/weights size mismatch");
    }
    std::vector<Atom> atoms;
    atoms.reserve(locations.size());
    for (std::size_t i = 0; i < locations.size(); ++i) {
        atoms.push_back(Atom{locations[i], std::abs(weights[i]),
                             std::arg(weights[i])});
    }
    return DiscreteMeasure(domain, std::move(atoms));
}

std::vector<double> DiscreteMeasure::locations() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const Atom& a : atoms_) out.push_back(a.t);
    return out;
}

double tv_norm(const DiscreteMeasure& mu) {
    double s = 0.0;
    for (const Atom& a : mu.atoms()) s += a.amplitude;
    return s;
}

double min_separation(const std::vector<double>& support,
                      const Domain& domain) {
    if (support.size() < 2) {
        throw DomainError("min_separation requires at least 2 points");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < support.size(); ++i) {
        for (std::size_t j = i + 1; j < support.size(); ++j) {
            best = std::min(best, domain.distance(support[i], support[j]));
        }
    }
    return best;
}

double distance_to_support(double x, const std::vector<double>& support,
                           const Domain& domain) {
    double best = std::numeric_limits<double>::infinity();
    for (double t : support) best = std::min(best, domain.distance(x, t));
    return best;
}

NearFarPartition partition_near_far(const std::vector<double>& points,
                                    const std::vector<double>& support,
                                    double c0, int m, const Domain& domain) {
    if (support.empty()) throw DomainError("partition_near_far: empty support");
    if (c0 <= 0.0) throw DomainError("partition_near_far: c0 must be > 0");
    if (m < 1) throw DomainError("partition_near_far: m must be >= 1");

    NearFarPartition part;
    part.radius_scale = c0;
    const double radius = c0 / static_cast<double>(m);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (distance_to_support(points[i], support, domain) <= radius) {
            part.near_indices.push_back(i);
        } else {
            part.far_indices.push_back(i);
        }
    }
    return part;
}

}  // namespace spikesolve
