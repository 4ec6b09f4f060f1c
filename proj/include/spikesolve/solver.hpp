#pragma once

#include <vector>

#include "spikesolve/family.hpp"
#include "spikesolve/measure.hpp"

namespace spikesolve {

struct SolverConfig {
    double lambda = 1.0;
    int dual_grid = 0;       // constraint discretization; 0 = 16 * family size
    int max_iters = 40000;   // Dykstra epochs
    double primal_dual_gap_tol = 1e-9;  // relative
    double delta_sup = 1e-3;  // accept |P| >= 1 - delta_sup as support
    double refine_tol = 1e-6; // peak refinement, fraction of domain length
    double optimality_tol = 1e-5;

    void validate(const MeasurementFamily& fam) const;
    int effective_dual_grid(const MeasurementFamily& fam) const;
};

/// Lemma-style optimality conditions of a candidate BLASSO solution:
/// (1) the residual polynomial sup-norm is at most lambda (certified upper
///     bound reported), and
/// (2) <y - c(D), c(D)> = lambda ||D||_TV.
struct OptimalityReport {
    double cond1_value = 0.0;     // certified upper for ||<c(D)-y, Phi>||_inf
    double cond2_residual = 0.0;  // relative
    double lambda = 0.0;
    double tol = 0.0;
    bool passed = false;
};

struct DualSolution {
    GeneralizedPolynomial poly;      // certified-feasible dual certificate
    GeneralizedPolynomial grid_poly; // grid-feasible iterate before rescaling
    double feasibility_slack = 0.0;  // continuous overshoot absorbed by rescale
    double dual_objective = 0.0;
    double gap = 0.0;                // primal-dual gap at termination
    int epochs = 0;                  // working-set rounds
};

struct SolveResult {
    DiscreteMeasure measure;
    GeneralizedPolynomial dual_coefficients;
    double objective = 0.0;
    double gap = 0.0;
    OptimalityReport optimality;
    double lambda = 0.0;
    double lambda_effective = 0.0;  // lambda / (1 + feasibility_slack)
    double feasibility_slack = 0.0;
    bool cardinality_ok = true;     // atom count <= family size + 1
    bool conditioning_warning = false;
    int dual_epochs = 0;
};

/// Fenchel-dual program: min ||a - y/lambda||_2^2 subject to ||P_a||_inf <= 1,
/// the constraint enforced on the dual grid by a working-set method: exact
/// restricted solves on the active nodes alternate with passes that sweep in
/// violated grid constraints (the coordinate form of Dykstra's scheme for
/// this projection). The result is certified; the returned polynomial is
/// rescaled to certified feasibility and the absorbed slack reported.
DualSolution solve_dual(const MeasurementFamily& fam, const SampleVector& y,
                        const SolverConfig& cfg);

/// Locations where |dual polynomial| reaches 1 - delta_sup: grid maxima
/// refined by golden-section, duplicates within refine_tol merged (keeping
/// the larger modulus).
std::vector<double> extract_support(const GeneralizedPolynomial& dual_poly,
                                    const SolverConfig& cfg);

struct AmplitudeFit {
    DiscreteMeasure measure;
    bool conditioning_warning = false;
};

/// Finite complex LASSO with atoms fixed at the support: proximal gradient
/// with modulus soft-thresholding (unpenalized=true swaps in a plain least
/// squares refit). Atoms below 1e-10 in modulus are dropped.
AmplitudeFit fit_amplitudes(const MeasurementFamily& fam,
                            const std::vector<double>& support,
                            const SampleVector& y, double lambda,
                            bool unpenalized = false);

OptimalityReport check_optimality(const MeasurementFamily& fam,
                                  const DiscreteMeasure& measure,
                                  const SampleVector& y, double lambda,
                                  double tol);

/// solve_dual -> extract_support -> fit_amplitudes, then support refinement
/// until the optimality conditions hold.
SolveResult solve(const MeasurementFamily& fam, const SampleVector& y,
                  const SolverConfig& cfg);

struct GridLassoResult {
    DiscreteMeasure measure;
    double objective = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

/// Brute-force oracle: the finite complex LASSO over atoms fixed at every
/// grid node, solved by FISTA to the duality-gap tolerance (relative).
/// Requires grid_size >= 32 * family size.
GridLassoResult grid_lasso_oracle(const MeasurementFamily& fam,
                                  const SampleVector& y, double lambda,
                                  int grid_size, double tol);

}  // namespace spikesolve
