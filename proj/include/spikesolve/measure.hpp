#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spikesolve/domain.hpp"

namespace spikesolve {

/// One spike in polar form: positive amplitude, phase in [0, 2*pi).
struct Atom {
    double t = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;

    std::complex<double> weight() const {
        return std::polar(amplitude, phase);
    }
};

/// Discrete complex measure: a finite sum of weighted Diracs on the domain.
///
/// Construction canonicalizes to polar form (amplitude > 0, phase in
/// [0, 2*pi)), drops zero atoms and rejects atom pairs closer than 1e-12;
/// callers merge coincident atoms explicitly.
class DiscreteMeasure {
  public:
    explicit DiscreteMeasure(Domain domain) : domain_(domain) {}
    DiscreteMeasure(Domain domain, std::vector<Atom> atoms);

    static DiscreteMeasure from_complex_weights(
        Domain domain, const std::vector<double>& locations,
        const std::vector<std::complex<double>>& weights);

    const Domain& domain() const { return domain_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    std::vector<double> locations() const;

  private:
    Domain domain_;
    std::vector<Atom> atoms_;
};

/// Total variation norm; for a discrete measure this is the amplitude sum.
double tv_norm(const DiscreteMeasure& mu);

/// Smallest pairwise distance among support points. Requires >= 2 points.
double min_separation(const std::vector<double>& support, const Domain& domain);

/// Points within c0/m of the support (boundary inclusive) vs. the rest.
struct NearFarPartition {
    double radius_scale = 0.0;                 // c0
    std::vector<std::size_t> near_indices;
    std::vector<std::size_t> far_indices;
};

NearFarPartition partition_near_far(const std::vector<double>& points,
                                    const std::vector<double>& support,
                                    double c0, int m, const Domain& domain);

/// Distance from a point to the nearest support element.
double distance_to_support(double x, const std::vector<double>& support,
                           const Domain& domain);

}  // namespace spikesolve
