#include "blockcd/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace blockcd {

ThetaSpec ThetaSpec::two_point(double m) {
    if (m < 1.0) throw std::invalid_argument("theta: two-point ratio m must be >= 1");
    ThetaSpec t;
    t.kind = m == 1.0 ? Kind::constant_one : Kind::two_point;
    t.ratio = m;
    return t;
}

ThetaSpec ThetaSpec::mixture(double m, double alpha) {
    if (m < 1.0) throw std::invalid_argument("theta: mixture ratio m must be >= 1");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("theta: mixture weight alpha must be in [0,1]");
    if (alpha == 0.0) return two_point(m);
    ThetaSpec t;
    t.kind = Kind::mixture;
    t.ratio = m;
    t.mix_weight = alpha;
    return t;
}

std::vector<double> ThetaSpec::support() const {
    switch (kind) {
        case Kind::constant_one:
            return {1.0};
        case Kind::two_point:
            return {2.0 / (ratio + 1.0), 2.0 * ratio / (ratio + 1.0)};
        case Kind::mixture:
            throw std::invalid_argument("theta: mixture kind has continuous support");
    }
    throw std::logic_error("unreachable");
}

std::vector<double> ThetaSpec::support_probs() const {
    return kind == Kind::constant_one ? std::vector<double>{1.0}
                                      : std::vector<double>{0.5, 0.5};
}

double ThetaSpec::max_value() const {
    switch (kind) {
        case Kind::constant_one:
            return 1.0;
        case Kind::two_point:
            return 2.0 * ratio / (ratio + 1.0);
        case Kind::mixture:
            return 2.0;
    }
    throw std::logic_error("unreachable");
}

double ThetaSpec::variance() const {
    const double m = ratio;
    const double two_point_var = (m - 1.0) * (m - 1.0) / ((m + 1.0) * (m + 1.0));
    switch (kind) {
        case Kind::constant_one:
            return 0.0;
        case Kind::two_point:
            return two_point_var;
        case Kind::mixture:
            return mix_weight / 3.0 + (1.0 - mix_weight) * two_point_var;
    }
    throw std::logic_error("unreachable");
}

double ThetaSpec::sample(RandomSource& rng) const {
    switch (kind) {
        case Kind::constant_one:
            return 1.0;
        case Kind::two_point:
            return rng.bernoulli(0.5) ? 2.0 * ratio / (ratio + 1.0) : 2.0 / (ratio + 1.0);
        case Kind::mixture:
            if (rng.bernoulli(mix_weight)) return 2.0 * rng.uniform();
            return rng.bernoulli(0.5) ? 2.0 * ratio / (ratio + 1.0) : 2.0 / (ratio + 1.0);
    }
    throw std::logic_error("unreachable");
}

std::string ThetaSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::constant_one:
            os << "constant";
            break;
        case Kind::two_point:
            os << "two-point(m=" << ratio << ")";
            break;
        case Kind::mixture:
            os << "mixture(m=" << ratio << ", alpha=" << mix_weight << ")";
            break;
    }
    return os.str();
}

std::vector<double> DcbmParams::joint_matrix() const {
    if (joint) return *joint;
    const auto probs = theta.support_probs();  // throws for mixture via support below
    const int M = static_cast<int>(probs.size());
    std::vector<double> J(static_cast<std::size_t>(K) * M);
    for (int a = 0; a < K; ++a)
        for (int u = 0; u < M; ++u)
            J[static_cast<std::size_t>(a) * M + u] = pi[static_cast<std::size_t>(a)] * probs[static_cast<std::size_t>(u)];
    return J;
}

namespace {

constexpr double kTol = 1e-9;

std::vector<double> pi_tilde_of(const DcbmParams& params) {
    if (params.theta.discrete() || params.joint) {
        const auto x = params.theta.support();
        const auto J = params.joint_matrix();
        const int M = static_cast<int>(x.size());
        std::vector<double> pt(static_cast<std::size_t>(params.K), 0.0);
        for (int a = 0; a < params.K; ++a)
            for (int u = 0; u < M; ++u)
                pt[static_cast<std::size_t>(a)] +=
                    x[static_cast<std::size_t>(u)] * J[static_cast<std::size_t>(a) * M + u];
        return pt;
    }
    // Mixture theta is independent of c with mean 1, so pi_tilde = pi.
    return params.pi;
}

double quad_form(const std::vector<double>& v, const std::vector<double>& P, int K) {
    double total = 0.0;
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            total += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)] *
                     P[static_cast<std::size_t>(a) * K + b];
    return total;
}

}  // namespace

DcbmParams validate(const DcbmParams& params) {
    const int K = params.K;
    if (K < 1) throw std::invalid_argument("params: K must be >= 1");
    if (static_cast<int>(params.pi.size()) != K)
        throw std::invalid_argument("params: pi must have K entries");
    double pi_sum = 0.0;
    for (double p : params.pi) {
        if (p <= 0.0) throw std::invalid_argument("params: pi entries must be positive");
        pi_sum += p;
    }
    if (std::abs(pi_sum - 1.0) > kTol)
        throw std::invalid_argument("params: pi must sum to 1");
    if (static_cast<int>(params.P.size()) != K * K)
        throw std::invalid_argument("params: P must be K x K");
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) {
            if (params.p(a, b) < 0.0)
                throw std::invalid_argument("params: P entries must be nonnegative");
            if (std::abs(params.p(a, b) - params.p(b, a)) > kTol)
                throw std::invalid_argument("params: P must be symmetric");
        }
    if (!(params.rho >= 0.0) || params.rho > 1.0)
        throw std::invalid_argument("params: rho must lie in [0,1]");

    if (params.joint) {
        if (!params.theta.discrete())
            throw std::invalid_argument("params: joint matrix requires discrete theta");
        const auto probs = params.theta.support_probs();
        const auto x = params.theta.support();
        const int M = static_cast<int>(probs.size());
        if (static_cast<int>(params.joint->size()) != K * M)
            throw std::invalid_argument("params: joint matrix must be K x M");
        for (int a = 0; a < K; ++a) {
            double row = 0.0;
            for (int u = 0; u < M; ++u) {
                const double v = (*params.joint)[static_cast<std::size_t>(a) * M + u];
                if (v < 0.0) throw std::invalid_argument("params: joint entries must be >= 0");
                row += v;
            }
            if (std::abs(row - params.pi[static_cast<std::size_t>(a)]) > kTol)
                throw std::invalid_argument("params: joint row marginal must equal pi");
        }
        double mean = 0.0;
        for (int a = 0; a < K; ++a)
            for (int u = 0; u < M; ++u)
                mean += x[static_cast<std::size_t>(u)] *
                        (*params.joint)[static_cast<std::size_t>(a) * M + u];
        if (std::abs(mean - 1.0) > kTol)
            throw std::invalid_argument("params: joint must give E[theta] = 1");
    }

    // Feasibility against the discrete support. The mixture's uniform [0,2]
    // component is exempt: the sampler clamps those probabilities at 1 and
    // counts the occurrences instead of failing.
    const double xmax = params.theta.kind == ThetaSpec::Kind::mixture
                            ? 2.0 * params.theta.ratio / (params.theta.ratio + 1.0)
                            : params.theta.max_value();
    double pmax = 0.0;
    for (double v : params.P) pmax = std::max(pmax, v);
    if (xmax * xmax * params.rho * pmax > 1.0 + kTol)
        throw std::invalid_argument(
            "params: infeasible, x_max^2 * max(rho P) exceeds 1");
    return params;
}

double rho_for_expected_degree(double lambda, int n, const DcbmParams& params) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const auto pt = pi_tilde_of(params);
    const double p0t = quad_form(pt, params.P, params.K);
    if (p0t <= 0.0) throw std::invalid_argument("lambda scaling: P is identically zero");
    const double rho = lambda / (static_cast<double>(n) * p0t);
    DcbmParams check = params;
    check.rho = rho;
    validate(check);  // rejects infeasible lambda
    return rho;
}

SampleResult sample_network(const DcbmParams& params, int n, std::uint64_t seed) {
    validate(params);
    RandomSource rng(seed);
    SampleResult out;
    out.truth.num_communities = params.K;
    out.truth.labels.resize(static_cast<std::size_t>(n));
    out.theta.resize(static_cast<std::size_t>(n));

    if (params.joint) {
        const auto x = params.theta.support();
        const auto& J = *params.joint;
        const int M = static_cast<int>(x.size());
        std::vector<double> flat(J.begin(), J.end());
        for (int i = 0; i < n; ++i) {
            const int cell = rng.categorical(flat);
            out.truth.labels[static_cast<std::size_t>(i)] = cell / M;
            out.theta[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(cell % M)];
        }
    } else {
        for (int i = 0; i < n; ++i)
            out.truth.labels[static_cast<std::size_t>(i)] = rng.categorical(params.pi);
        for (int i = 0; i < n; ++i) out.theta[static_cast<std::size_t>(i)] = params.theta.sample(rng);
    }

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double p = out.theta[static_cast<std::size_t>(i)] * out.theta[static_cast<std::size_t>(j)] *
                       params.rho *
                       params.p(out.truth.labels[static_cast<std::size_t>(i)],
                                out.truth.labels[static_cast<std::size_t>(j)]);
            if (p > 1.0) {
                if (params.theta.kind != ThetaSpec::Kind::mixture)
                    throw std::runtime_error("sample_network: edge probability exceeds 1");
                p = 1.0;
                ++out.clamped;
            }
            if (p > 0.0 && rng.bernoulli(p)) edges.emplace_back(i, j);
        }
    }
    out.graph = Graph::from_edges(n, edges);
    return out;
}

PopulationQuantities population_quantities(const DcbmParams& params) {
    if (!params.theta.discrete() && !params.joint)
        throw std::invalid_argument(
            "population quantities require a discrete theta distribution");
    const int K = params.K;
    PopulationQuantities q;
    q.pi_tilde = pi_tilde_of(params);
    q.P0 = quad_form(params.pi, params.P, K);
    q.P0_tilde = quad_form(q.pi_tilde, params.P, K);
    if (q.P0_tilde <= 0.0)
        throw std::invalid_argument("population quantities: P0_tilde is zero");
    q.W_tilde.resize(static_cast<std::size_t>(K) * K);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            q.W_tilde[static_cast<std::size_t>(a) * K + b] =
                q.pi_tilde[static_cast<std::size_t>(a)] * q.pi_tilde[static_cast<std::size_t>(b)] *
                params.p(a, b) / q.P0_tilde;
    std::vector<double> row_sum(static_cast<std::size_t>(K), 0.0);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            row_sum[static_cast<std::size_t>(a)] += q.W_tilde[static_cast<std::size_t>(a) * K + b];
    q.E_tilde.resize(static_cast<std::size_t>(K) * K);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            q.E_tilde[static_cast<std::size_t>(a) * K + b] =
                q.W_tilde[static_cast<std::size_t>(a) * K + b] -
                row_sum[static_cast<std::size_t>(a)] * row_sum[static_cast<std::size_t>(b)];
    return q;
}

namespace {

std::vector<double> parse_doubles(const std::string& text) {
    std::istringstream ss(text);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

}  // namespace

ParamFile load_params(std::istream& in) {
    std::string line;
    int K = 0;
    std::vector<double> pi, P;
    std::string theta_kind = "constant";
    double m = 1.0, alpha = 0.0;
    std::optional<double> rho, lambda;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("params: line " + std::to_string(line_no) +
                                         ": expected key = value");
            continue;
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key == "K") K = std::stoi(value);
        else if (key == "pi") pi = parse_doubles(value);
        else if (key == "P") P = parse_doubles(value);
        else if (key == "theta") theta_kind = value;
        else if (key == "m") m = std::stod(value);
        else if (key == "alpha") alpha = std::stod(value);
        else if (key == "rho") rho = std::stod(value);
        else if (key == "lambda") lambda = std::stod(value);
        else throw std::runtime_error("params: unknown key '" + key + "'");
    }
    ParamFile pf;
    pf.params.K = K;
    pf.params.pi = std::move(pi);
    pf.params.P = std::move(P);
    if (theta_kind == "constant") pf.params.theta = ThetaSpec::constant();
    else if (theta_kind == "two-point") pf.params.theta = ThetaSpec::two_point(m);
    else if (theta_kind == "mixture") pf.params.theta = ThetaSpec::mixture(m, alpha);
    else throw std::runtime_error("params: unknown theta kind '" + theta_kind + "'");
    if (rho && lambda) throw std::runtime_error("params: give rho or lambda, not both");
    if (rho) pf.params.rho = *rho;
    pf.lambda = lambda;
    return pf;
}

void write_params(std::ostream& out, const ParamFile& pf) {
    out << "K = " << pf.params.K << "\n";
    out << "pi =";
    for (double v : pf.params.pi) out << ' ' << v;
    out << "\nP =";
    for (double v : pf.params.P) out << ' ' << v;
    out << "\n";
    switch (pf.params.theta.kind) {
        case ThetaSpec::Kind::constant_one:
            out << "theta = constant\n";
            break;
        case ThetaSpec::Kind::two_point:
            out << "theta = two-point\nm = " << pf.params.theta.ratio << "\n";
            break;
        case ThetaSpec::Kind::mixture:
            out << "theta = mixture\nm = " << pf.params.theta.ratio
                << "\nalpha = " << pf.params.theta.mix_weight << "\n";
            break;
    }
    if (pf.lambda) out << "lambda = " << *pf.lambda << "\n";
    else out << "rho = " << pf.params.rho << "\n";
}

DcbmParams resolve_params(const ParamFile& pf, int n) {
    DcbmParams p = pf.params;
    if (pf.lambda) p.rho = rho_for_expected_degree(*pf.lambda, n, p);
    return validate(p);
}

}  // namespace blockcd
