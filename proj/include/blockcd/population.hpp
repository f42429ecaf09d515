#pragma once

// Population-version machinery: H(S), h(S), the empirical array R(e),
// population criterion values, the consistency condition checkers, a Monte-Carlo
// verifier of the expectation identity behind them, and a grid oracle for
// "is the population criterion maximized by the true partition".

#include <cstdint>
#include <vector>

#include "blockcd/criteria.hpp"
#include "blockcd/models.hpp"

namespace blockcd {

// A K x K x M array S (indexed k, a, u) with column constraints
// sum_k S_kau = Pi_au, S >= 0, plus the theta support x it refers to.
struct PopulationAssignment {
    int K = 0, M = 0;
    std::vector<double> S;      // row-major (k, a, u)
    std::vector<double> x;      // length M
    std::vector<double> joint;  // K x M, the Pi constraint

    double s(int k, int a, int u) const {
        return S[(static_cast<std::size_t>(k) * K + a) * M + u];
    }
    double& s(int k, int a, int u) {
        return S[(static_cast<std::size_t>(k) * K + a) * M + u];
    }

    void check_valid() const;  // throws if S < 0 or columns don't sum to Pi

    // The diagonal assignment: S_kau = Pi_au for k == a, 0 otherwise.
    static PopulationAssignment diagonal(const DcbmParams& params);
};

// H_kl(S) = sum_{abuv} x_u x_v P_ab S_kau S_lbv; K x K row-major.
std::vector<double> population_H(const PopulationAssignment& S, const std::vector<double>& P);

// h_k(S) = sum_{au} S_kau.
std::vector<double> population_h(const PopulationAssignment& S);

// R_kau(e) = (1/n) sum_i I(e_i=k, c_i=a, theta_i=x_u). The joint field is set
// to the empirical marginal over k. Throws if a theta value is not in x.
PopulationAssignment empirical_R(const Labeling& e, const Labeling& c,
                                 const std::vector<double>& theta,
                                 const std::vector<double>& x);

// Population criterion F(H(S), h(S)):
//   erm:  sum_k ( H_kk - h_k^2 P0 )
//   ngm:  sum_k ( H_kk/Pt0 - (H_k/Pt0)^2 ),  H_k = sum_l H_kl
//   bm:   sum_kl ( H_kl log(H_kl/(h_k h_l)) - H_kl )
//   dcbm: sum_kl ( H_kl log(H_kl/(H_k H_l)) - H_kl )
double population_criterion(Criterion kind, const PopulationAssignment& S,
                            const DcbmParams& params);

struct ConditionReport {
    bool pass = false;
    std::vector<double> matrix;  // E_tilde (ngm) as K x K, or {P0} (erm)
};

// Sign pattern E_aa > 0, E_ab < 0 for a != b (consistency of ngm).
ConditionReport check_ngm_condition(const DcbmParams& params);

// P_aa > P0, P_ab < P0 for a != b; standard block model (theta == 1) only.
ConditionReport check_erm_condition(const DcbmParams& params);

struct Prop1Report {
    double max_abs_z = 0.0;   // over all (labeling, k, l) cells
    bool f_equals_h = false;  // f_k(e) == h_k(R(e)), exact on integer counts
    int labelings = 0;
    int replications = 0;
};

// Samples (c, theta) once, then `reps` conditional graphs; checks that the
// Monte-Carlo mean of O_kl / (n^2 rho) matches H_kl(R(e)) for several fixed
// labelings, and that f = h o R holds exactly.
Prop1Report verify_proposition1(const DcbmParams& params, int n, std::uint64_t seed, int reps);

struct GridMaxResult {
    PopulationAssignment argmax;
    double value = 0.0;
    bool is_diagonal = false;   // argmax equals the diagonal up to row permutation
    double diagonal_value = 0.0;
    std::int64_t points = 0;
};

// Enumerates S on the grid that splits each column mass Pi_au across the K
// rows in fractions j/g, and returns the maximizer. Certifies only that no
// grid point beats the diagonal, not continuum uniqueness. Ties keep the
// first point in enumeration order. Budget-limited: throws if the grid has
// more than ~5e7 points.
GridMaxResult brute_force_population_max(Criterion kind, const DcbmParams& params, int grid);

}  // namespace blockcd
