#include "blockcd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "blockcd/eval.hpp"

namespace blockcd {

void ExperimentSpec::check_valid() const {
    if (replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
    if (sweep_values.empty()) throw std::invalid_argument("experiment: empty sweep");
    if (criteria.empty()) throw std::invalid_argument("experiment: no criteria");
    if (metric != "ari" && metric != "nmi")
        throw std::invalid_argument("experiment: metric must be ari or nmi");
    if (sweep_param != "m" && sweep_param != "alpha" && sweep_param != "pi" &&
        sweep_param != "lambda")
        throw std::invalid_argument("experiment: sweep_param must be m|alpha|pi|lambda");
    if (sweep_param == "pi" && K != 2)
        throw std::invalid_argument("experiment: pi sweep requires K = 2");
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Model parameters at one sweep point; throws on infeasible settings.
DcbmParams sweep_point_params(const ExperimentSpec& spec, double value, double* lambda_out) {
    DcbmParams p;
    p.K = spec.K;
    p.pi = spec.pi;
    p.P = spec.P;
    p.theta = spec.theta;
    double lambda = spec.lambda;
    if (spec.sweep_param == "m") {
        p.theta = ThetaSpec::two_point(value);
    } else if (spec.sweep_param == "alpha") {
        p.theta = ThetaSpec::mixture(spec.theta.ratio, value);
    } else if (spec.sweep_param == "pi") {
        if (value <= 0.0 || value >= 1.0)
            throw std::invalid_argument("pi sweep value must lie in (0,1)");
        p.pi = {value, 1.0 - value};
    } else if (spec.sweep_param == "lambda") {
        lambda = value;
    }
    p.rho = rho_for_expected_degree(lambda, spec.n, p);
    if (p.rho <= 0.0) throw std::invalid_argument("sweep point gives an empty graph");
    *lambda_out = lambda;
    return validate(p);
}

Labeling detect(const Graph& g, int K, Criterion kind, const MethodConfig& method,
                std::uint64_t seed) {
    if (method.kind == MethodConfig::Kind::spectral) {
        if (K != 2) throw std::invalid_argument("spectral method requires K = 2");
        return spectral_bisect(g, kind, method.spectral_tol, method.spectral_iters, seed)
            .labeling;
    }
    TabuConfig cfg = method.tabu;
    cfg.seed = seed;
    return tabu_search(g, K, kind, cfg).labeling;
}

}  // namespace

std::vector<ExperimentCell> run_experiment(const ExperimentSpec& spec, std::ostream* csv) {
    spec.check_valid();
    if (csv)
        *csv << "sweep_param,sweep_value,criterion,method,replication,metric,value,seed\n";

    std::vector<ExperimentCell> cells;
    for (std::size_t si = 0; si < spec.sweep_values.size(); ++si) {
        const double sv = spec.sweep_values[si];
        const std::uint64_t sweep_seed = derive_seed(spec.seed, si);

        DcbmParams params;
        std::string point_error;
        double lambda = 0.0;
        try {
            params = sweep_point_params(spec, sv, &lambda);
        } catch (const std::exception& ex) {
            point_error = ex.what();
        }

        // Sample once per replication, shared by all criteria.
        std::vector<SampleResult> samples;
        if (point_error.empty()) {
            samples.reserve(static_cast<std::size_t>(spec.replications));
            for (int rep = 0; rep < spec.replications; ++rep)
                samples.push_back(sample_network(params, spec.n,
                                                 derive_seed(sweep_seed, static_cast<std::uint64_t>(rep))));
        }

        for (Criterion kind : spec.criteria) {
            ExperimentCell cell;
            cell.sweep_value = sv;
            cell.criterion = kind;
            if (!point_error.empty()) {
                cell.error = true;
                cell.error_message = point_error;
            } else {
                for (int rep = 0; rep < spec.replications; ++rep) {
                    const auto& sample = samples[static_cast<std::size_t>(rep)];
                    const std::uint64_t run_seed =
                        derive_seed(derive_seed(sweep_seed, static_cast<std::uint64_t>(rep)),
                                    static_cast<std::uint64_t>(kind) + 101);
                    try {
                        const Labeling found =
                            detect(sample.graph, spec.K, kind, spec.method, run_seed);
                        const double value = spec.metric == "ari"
                                                 ? adjusted_rand(found, sample.truth)
                                                 : nmi(found, sample.truth);
                        cell.values.push_back(value);
                    } catch (const std::exception& ex) {
                        cell.error = true;
                        cell.error_message = ex.what();
                        break;
                    }
                }
            }
            if (!cell.error) cell.median = median_of(cell.values);

            if (csv) {
                const std::string base = spec.sweep_param + "," + format_value(sv) + "," +
                                         criterion_name(kind) + "," + spec.method.name() + ",";
                if (cell.error) {
                    *csv << base << "error," << spec.metric << ",nan,"
                         << spec.seed << "\n";
                } else {
                    for (int rep = 0; rep < spec.replications; ++rep)
                        *csv << base << rep << ',' << spec.metric << ','
                             << format_value(cell.values[static_cast<std::size_t>(rep)]) << ','
                             << spec.seed << "\n";
                    *csv << base << "median," << spec.metric << ','
                         << format_value(cell.median) << ',' << spec.seed << "\n";
                }
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

namespace {

std::vector<double> range_values(double from, double to, double step) {
    std::vector<double> out;
    for (double v = from; v <= to + 1e-9; v += step) out.push_back(v);
    return out;
}

}  // namespace

ExperimentSpec experiment_preset(const std::string& name, bool full) {
    ExperimentSpec spec;
    spec.name = name;
    spec.n = full ? 1000 : 300;
    spec.replications = full ? 100 : 20;
    spec.method.tabu.restarts = 10;
    if (name == "fig1-sparse" || name == "fig1-mid" || name == "fig1-dense") {
        spec.lambda = name == "fig1-sparse" ? 12.0 : name == "fig1-mid" ? 40.0 : 125.0;
        spec.sweep_param = "m";
        spec.sweep_values = range_values(1, 10, 1);
    } else if (name == "fig2") {
        // pi-sweep under the standard block model.
        spec.theta = ThetaSpec::constant();
        spec.sweep_param = "pi";
        spec.sweep_values = {0.1, 0.2, 0.3, 0.4, 0.5};
        spec.lambda = 40.0;
    } else if (name == "fig3") {
        // Unbalanced communities, two-point m-sweep.
        spec.pi = {0.3, 0.7};
        spec.sweep_param = "m";
        spec.sweep_values = range_values(1, 10, 1);
        spec.lambda = 40.0;
    } else if (name == "fig4") {
        // Mixture degree distribution, alpha-sweep at m = 10.
        spec.theta = ThetaSpec::two_point(10.0);
        spec.sweep_param = "alpha";
        spec.sweep_values = {0.0, 0.25, 0.5, 0.75, 1.0};
        spec.lambda = 40.0;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return spec;
}

std::vector<std::string> experiment_preset_names() {
    return {"fig1-sparse", "fig1-mid", "fig1-dense", "fig2", "fig3", "fig4"};
}

ExperimentSpec load_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    int line_no = 0;
    double theta_m = 1.0, theta_alpha = 0.0;
    std::string theta_kind = "constant";
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("experiment spec: line " + std::to_string(line_no) +
                                         ": expected key = value");
            continue;
        }
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        std::istringstream vs(value);
        if (key == "name") spec.name = value;
        else if (key == "n") spec.n = std::stoi(value);
        else if (key == "K") spec.K = std::stoi(value);
        else if (key == "pi") {
            spec.pi.clear();
            double v;
            while (vs >> v) spec.pi.push_back(v);
        } else if (key == "P") {
            spec.P.clear();
            double v;
            while (vs >> v) spec.P.push_back(v);
        } else if (key == "lambda") spec.lambda = std::stod(value);
        else if (key == "theta") theta_kind = value;
        else if (key == "m") theta_m = std::stod(value);
        else if (key == "alpha") theta_alpha = std::stod(value);
        else if (key == "sweep") spec.sweep_param = value;
        else if (key == "sweep_values") {
            spec.sweep_values.clear();
            double v;
            while (vs >> v) spec.sweep_values.push_back(v);
        } else if (key == "criteria") {
            spec.criteria.clear();
            std::string c;
            while (vs >> c) spec.criteria.push_back(parse_criterion(c));
        } else if (key == "method") {
            if (value == "tabu") spec.method.kind = MethodConfig::Kind::tabu;
            else if (value == "spectral") spec.method.kind = MethodConfig::Kind::spectral;
            else throw std::runtime_error("experiment spec: unknown method '" + value + "'");
        } else if (key == "replications") spec.replications = std::stoi(value);
        else if (key == "metric") spec.metric = value;
        else if (key == "seed") spec.seed = std::stoull(value);
        else if (key == "restarts") spec.method.tabu.restarts = std::stoi(value);
        else if (key == "tenure") spec.method.tabu.tenure = std::stoi(value);
        else if (key == "max_iters") spec.method.tabu.max_iters = std::stoll(value);
        else if (key == "max_stall") spec.method.tabu.max_stall = std::stoll(value);
        else throw std::runtime_error("experiment spec: unknown key '" + key + "'");
    }
    if (theta_kind == "constant") spec.theta = ThetaSpec::constant();
    else if (theta_kind == "two-point") spec.theta = ThetaSpec::two_point(theta_m);
    else if (theta_kind == "mixture") spec.theta = ThetaSpec::mixture(theta_m, theta_alpha);
    else throw std::runtime_error("experiment spec: unknown theta kind '" + theta_kind + "'");
    spec.check_valid();
    return spec;
}

namespace {

DcbmParams counterexample_params() {
    DcbmParams p;
    p.K = 2;
    p.pi = {0.5, 0.5};
    p.P = {0.1, 0.05, 0.05, 0.1};
    p.rho = 1.0;
    p.theta = ThetaSpec::two_point(4.0);  // values 0.4 and 1.6, equiprobable
    return validate(p);
}

// Assignment grouping nodes by their theta value instead of community.
PopulationAssignment theta_grouped(const DcbmParams& params) {
    PopulationAssignment s = PopulationAssignment::diagonal(params);
    std::fill(s.S.begin(), s.S.end(), 0.0);
    for (int a = 0; a < s.K; ++a)
        for (int u = 0; u < s.M; ++u)
            s.s(u % s.K, a, u) = s.joint[static_cast<std::size_t>(a) * s.M + u];
    return s;
}

}  // namespace

CounterexampleReport run_counterexample(std::uint64_t seed, int seeds, int grid) {
    CounterexampleReport rep;
    rep.params = counterexample_params();
    const auto diag = PopulationAssignment::diagonal(rep.params);
    const auto grouped = theta_grouped(rep.params);
    rep.erm_truth = population_criterion(Criterion::erm, diag, rep.params);
    rep.erm_grouped = population_criterion(Criterion::erm, grouped, rep.params);
    rep.ngm_truth = population_criterion(Criterion::ngm, diag, rep.params);
    rep.ngm_grouped = population_criterion(Criterion::ngm, grouped, rep.params);

    if (grid > 0) {
        const auto erm_grid = brute_force_population_max(Criterion::erm, rep.params, grid);
        const auto ngm_grid = brute_force_population_max(Criterion::ngm, rep.params, grid);
        rep.erm_grid_diagonal = erm_grid.is_diagonal;
        rep.ngm_grid_diagonal = ngm_grid.is_diagonal;
        rep.erm_grid_value = erm_grid.value;
        rep.ngm_grid_value = ngm_grid.value;
    }

    rep.seeds = seeds;
    if (seeds > 0) {
        const int n = 2000;
        TabuConfig cfg;
        cfg.restarts = 5;
        cfg.max_stall = 2LL * n;
        std::vector<double> bm_ari;
        for (int s = 0; s < seeds; ++s) {
            const auto sample =
                sample_network(rep.params, n, derive_seed(seed, static_cast<std::uint64_t>(s)));
            Labeling by_theta;
            by_theta.num_communities = 2;
            for (double th : sample.theta) by_theta.labels.push_back(th > 1.0 ? 1 : 0);

            cfg.seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(s));
            const auto erm = tabu_search(sample.graph, 2, Criterion::erm, cfg);
            if (adjusted_rand(erm.labeling, by_theta) > adjusted_rand(erm.labeling, sample.truth))
                ++rep.erm_prefers_grouping;

            cfg.seed = derive_seed(seed, 2000 + static_cast<std::uint64_t>(s));
            const auto bm = tabu_search(sample.graph, 2, Criterion::bm, cfg);
            bm_ari.push_back(adjusted_rand(bm.labeling, sample.truth));
        }
        rep.bm_median_ari_truth = median_of(bm_ari);
    }
    return rep;
}

DegreeStats degree_stats(const Graph& g) {
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) d.push_back(static_cast<double>(g.degree(i)));
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    if (n == 0) return {};
    // Linear-interpolation quantiles (R type 7).
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < n ? d[lo] * (1.0 - frac) + d[lo + 1] * frac : d[lo];
    };
    DegreeStats s;
    for (double v : d) s.mean += v;
    s.mean /= static_cast<double>(n);
    s.median = quantile(0.5);
    s.q1 = quantile(0.25);
    s.q3 = quantile(0.75);
    s.min = d.front();
    s.max = d.back();
    return s;
}

PolblogsReport run_polblogs(const std::string& graph_path,
                            const std::optional<std::string>& labels_path,
                            std::uint64_t seed, const TabuConfig& tabu_cfg) {
    std::ifstream in(graph_path);
    if (!in)
        throw std::runtime_error("polblogs: cannot open graph file '" + graph_path +
                                 "' (expected the GML network file)");
    const bool gml = graph_path.size() >= 4 &&
                     graph_path.compare(graph_path.size() - 4, 4, ".gml") == 0;
    LoadedGraph loaded = gml ? load_gml_subset(in) : load_edge_list(in);

    std::optional<Labeling> raw_truth = loaded.true_labels;
    if (labels_path) {
        std::ifstream lin(*labels_path);
        if (!lin) throw std::runtime_error("polblogs: cannot open label file '" + *labels_path + "'");
        raw_truth = dense_labeling(read_label_file(lin));
        if (raw_truth->size() != loaded.graph.num_nodes())
            throw std::runtime_error("polblogs: label file length mismatch");
    }
    if (!raw_truth) throw std::runtime_error("polblogs: no hand labels available");

    const auto lcc = largest_connected_component(loaded.graph);
    Labeling truth;
    truth.num_communities = raw_truth->num_communities;
    for (int original : lcc.original_index)
        truth.labels.push_back(raw_truth->labels[static_cast<std::size_t>(original)]);

    PolblogsReport rep;
    rep.n = lcc.graph.num_nodes();
    rep.total_degree = lcc.graph.total_degree();
    rep.edges = lcc.graph.num_edges();
    rep.loops = lcc.graph.num_loops();
    rep.degrees = degree_stats(lcc.graph);

    for (Criterion kind : kAllCriteria) {
        TabuConfig cfg = tabu_cfg;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(kind));
        const auto result = tabu_search(lcc.graph, 2, kind, cfg);
        rep.tabu_ari.emplace_back(kind, adjusted_rand(result.labeling, truth));
    }
    const auto spec_erm = spectral_bisect(lcc.graph, Criterion::erm, 1e-10, 5000, derive_seed(seed, 77));
    const auto spec_ngm = spectral_bisect(lcc.graph, Criterion::ngm, 1e-10, 5000, derive_seed(seed, 78));
    rep.spectral_erm_ari = adjusted_rand(spec_erm.labeling, truth);
    rep.spectral_ngm_ari = adjusted_rand(spec_ngm.labeling, truth);
    return rep;
}

}  // namespace blockcd
