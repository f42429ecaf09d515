#pragma once

// Generative samplers for the standard and degree-corrected stochastic block
// models, parameter validation, degree scaling, and the derived population
// quantities used by the condition checkers.
//
// Model: each node independently draws (c_i, theta_i); given those, edges
// (loops included) are independent Bernoulli with mean theta_i theta_j rho
// P[c_i][c_j]. The standard block model is theta == 1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blockcd/graph.hpp"
#include "blockcd/rng.hpp"

namespace blockcd {

// Degree-parameter distribution. All kinds have mean 1.
struct ThetaSpec {
    enum class Kind { constant_one, two_point, mixture };

    Kind kind = Kind::constant_one;
    double ratio = 1.0;       // m: ratio between the two discrete values
    double mix_weight = 0.0;  // alpha: probability of the uniform [0,2] draw

    static ThetaSpec constant() { return {}; }
    static ThetaSpec two_point(double m);
    static ThetaSpec mixture(double m, double alpha);

    bool discrete() const { return kind != Kind::mixture; }

    // Discrete support, ascending: {1} or {2/(m+1), 2m/(m+1)}. Throws for the
    // mixture kind.
    std::vector<double> support() const;
    std::vector<double> support_probs() const;

    // Largest possible value (essential sup 2 for the mixture).
    double max_value() const;

    double variance() const;  // closed form
    double sample(RandomSource& rng) const;
    std::string describe() const;
};

struct DcbmParams {
    int K = 1;
    std::vector<double> pi;       // length K, positive, sums to 1
    std::vector<double> P;        // K*K symmetric nonnegative, row-major
    double rho = 1.0;             // edge-probability scale, in (0,1]
    ThetaSpec theta;
    // Optional joint law of (c, theta): K x M row-major, marginals must match
    // pi and the theta support probabilities. Default is independence.
    std::optional<std::vector<double>> joint;

    double p(int a, int b) const { return P[static_cast<std::size_t>(a) * K + b]; }

    // Joint matrix (default Pi_au = pi_a p_u). Discrete theta only.
    std::vector<double> joint_matrix() const;
};

// Scalars and matrices derived from the model parameters:
// pi_tilde_a = sum_u x_u Pi_au; P0 = sum pi pi P; P0_tilde = sum pt pt P;
// W_ab = pt_a pt_b P_ab / P0_tilde; E = W - (W1)(W1)^T.
struct PopulationQuantities {
    std::vector<double> pi_tilde;
    double P0 = 0.0;
    double P0_tilde = 0.0;
    std::vector<double> W_tilde;  // K*K
    std::vector<double> E_tilde;  // K*K
};

// Throws a descriptive error naming the violated constraint; returns the
// params unchanged otherwise. Feasibility: x_max^2 * max(rho P_ab) <= 1.
DcbmParams validate(const DcbmParams& params);

// rho = lambda / (n * sum_ab pt_a pt_b P_ab), making the marginal edge
// probability lambda/n (loops aside, the expected degree is lambda).
double rho_for_expected_degree(double lambda, int n, const DcbmParams& params);

struct SampleResult {
    Graph graph;
    Labeling truth;
    std::vector<double> theta;
    // Edge probabilities clamped to 1 (mixture theta in dense regimes only).
    std::int64_t clamped = 0;
};

SampleResult sample_network(const DcbmParams& params, int n, std::uint64_t seed);

// Discrete theta (or explicit joint) only.
PopulationQuantities population_quantities(const DcbmParams& params);

// Flat key-value parameter file: K, pi, P (row-major), theta kind and its
// (m, alpha), and either rho or lambda.
struct ParamFile {
    DcbmParams params;            // rho filled when the file gives rho
    std::optional<double> lambda; // resolved to rho once n is known
};

ParamFile load_params(std::istream& in);
void write_params(std::ostream& out, const ParamFile& pf);

// Resolves lambda (if present) to rho for the given n and validates.
DcbmParams resolve_params(const ParamFile& pf, int n);

}  // namespace blockcd
