// Experiment driver: every module behind a seeded, reproducible subcommand.
// Data files carry a schema_version and never contain timestamps; wall time
// and the full flag map go to a side manifest, so identical invocations
// produce byte-identical data outputs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "addcomb/cayley.hpp"
#include "addcomb/core.hpp"
#include "addcomb/dissociation.hpp"
#include "addcomb/enumerate.hpp"
#include "addcomb/freiman.hpp"
#include "addcomb/missing.hpp"
#include "addcomb/regularity.hpp"
#include "addcomb/structure.hpp"
#include "addcomb/sumset.hpp"

using json = nlohmann::json;
using namespace addcomb;

namespace {

constexpr const char* kVersion = "0.2.0";
constexpr int kSchemaVersion = 1;

struct RunContext {
    std::string subcommand;
    std::vector<std::string> argv;
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 0;
    json flags = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    int effective_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }

    std::string path(const std::string& name) {
        std::filesystem::create_directories(out_dir);
        return (std::filesystem::path(out_dir) / name).string();
    }

    void write_manifest() {
        json m;
        m["schema_version"] = kSchemaVersion;
        m["subcommand"] = subcommand;
        m["argv"] = argv;
        m["flags"] = flags;
        m["seed"] = seed;
        m["code_version"] = kVersion;
        m["outputs"] = outputs;
        m["threads"] = effective_threads();
        m["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        std::ofstream f(path(subcommand + "_manifest.json"));
        f << m.dump(2) << "\n";
    }
};

Ambient parse_ambient(const std::string& kind, std::int64_t n, std::int64_t lo) {
    if (kind == "int") return Ambient::interval(lo, lo + n - 1);
    if (kind == "cyclic") return Ambient::cyclic(n);
    throw CLI::ValidationError("--ambient must be 'int' or 'cyclic'");
}

int run_count(RunContext& ctx, std::int64_t n, std::int64_t lo, const std::string& kind,
              std::int64_t k, std::int64_t m, bool restricted, double K, double delta,
              double ceiling) {
    CountQuery q{parse_ambient(kind, n, lo), k, m < 0 ? kUnboundedSumset : m, restricted};
    EnumOptions opt;
    opt.node_ceiling = ceiling;
    opt.threads = ctx.effective_threads();
    const CountResult res = count_small_sumset(q, opt);

    json row;
    row["schema_version"] = kSchemaVersion;
    row["ambient"] = kind;
    row["N"] = n;
    row["k"] = k;
    row["m"] = m;
    row["restricted"] = restricted;
    row["count"] = res.exact_count.get_str();
    if (K > 0 && delta > 0) {
        const BoundResult b = theorem1_bound(n, K, k, delta);
        row["bound"] = b.value.get_str();
        row["bound_zero_warning"] = b.zero_warning;
        if (b.value > 0) {
            const Rational ratio = make_rational(res.exact_count, b.value);
            row["count_over_bound"] = ratio.get_d();
        }
    } else {
        row["bound"] = nullptr;
    }
    // Wall time goes to the manifest only: data files must be reproducible
    // byte-for-byte from the same invocation.
    row["nodes"] = res.nodes_explored;
    json breakdown = json::object();
    for (const auto& [size, c] : res.per_m_breakdown) breakdown[std::to_string(size)] = c.get_str();
    row["per_m_breakdown"] = breakdown;

    const std::string out = ctx.path("count.jsonl");
    std::ofstream f(out);
    f << row.dump() << "\n";
    ctx.outputs.push_back(out);
    std::cout << "count=" << res.exact_count.get_str() << " nodes=" << res.nodes_explored << "\n";
    return 0;
}

int run_pollard(RunContext& ctx, std::int64_t q, double beta, std::uint64_t samples) {
    if (!is_prime(q)) throw std::domain_error("pollard: q must be prime");
    const Rational beta_r(beta);
    const std::string out = ctx.path("pollard.jsonl");
    std::ofstream f(out);
    std::int64_t violations = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        SeededSource src(ctx.seed, i);
        GSet s(Ambient::cyclic(q));
        for (std::int64_t x = 0; x < q; ++x)
            if (src.coin()) s.insert(x);
        const PollardReport rep = pollard_report(s, beta_r);
        if (!rep.inequality_holds) ++violations;
        json row;
        row["schema_version"] = kSchemaVersion;
        row["q"] = q;
        row["stream"] = i;
        row["set_size"] = rep.set_size;
        row["t"] = rep.t_used;
        row["averaged_lhs"] = rep.averaged_lhs.get_d();
        row["averaged_rhs"] = rep.averaged_rhs;
        row["inequality_holds"] = rep.inequality_holds;
        row["threshold"] = rep.threshold;
        row["threshold_nested"] = rep.threshold_nested;
        row["popular_count"] = rep.popular_count;
        row["popular_count_nested"] = rep.popular_count_nested;
        row["conclusion_holds"] = rep.conclusion_holds;
        row["q_large_enough"] = rep.q_large_enough;
        f << row.dump() << "\n";
    }
    ctx.outputs.push_back(out);
    std::cout << "samples=" << samples << " averaged-inequality violations=" << violations << "\n";
    return violations == 0 ? 0 : 2;
}

int run_freiman(RunContext& ctx, const std::string& elems, const std::string& kind,
                std::int64_t n, std::int64_t lo, std::int64_t hom_n, std::int64_t dilate_len) {
    std::vector<std::int64_t> xs;
    std::stringstream ss(elems);
    std::string tok;
    while (std::getline(ss, tok, ',')) xs.push_back(std::stoll(tok));
    GSet a(parse_ambient(kind, n, lo), xs);
    const FreimanDim dim = freiman_dimension(a);
    json row;
    row["schema_version"] = kSchemaVersion;
    row["elements"] = xs;
    row["r"] = dim.r;
    const DoublingStats st = doubling_stats(a);
    row["sumset_size"] = st.sumset_size;
    row["restricted_size"] = st.restricted_size;
    row["doubling"] = st.doubling.get_d();
    if (hom_n > 0) {
        const HomCount hc = count_freiman_homs(a, hom_n);
        row["hom_count"] = hc.count.get_str();
        row["hom_bound"] = hc.bound.get_str();
    }
    if (dilate_len > 0) {
        // Dilates mapping A into a short cyclic interval; the ratio
        // found * k / N tracks how plentiful they are.
        const auto lams = dilates_into_short_interval(a, dilate_len);
        row["short_interval_dilates"] = lams.size();
        row["dilate_ratio_k_over_N"] = static_cast<double>(lams.size()) *
                                       static_cast<double>(a.size()) /
                                       static_cast<double>(a.ambient().modulus());
    }
    const std::string out = ctx.path("freiman.jsonl");
    std::ofstream f(out);
    f << row.dump() << "\n";
    ctx.outputs.push_back(out);
    std::cout << "r=" << dim.r << "\n";
    return 0;
}

int run_regularity(RunContext& ctx, std::int64_t p, double eps, std::int64_t q_min,
                   double density, std::int64_t interval_len, std::uint64_t samples) {
    const std::string out = ctx.path("regularity_trace.json");
    json runs = json::array();
    for (std::uint64_t i = 0; i < samples; ++i) {
        GSet a(Ambient::cyclic(p));
        if (interval_len > 0) {
            for (std::int64_t x = 0; x < interval_len; ++x) a.insert(x);
        } else {
            SeededSource src(ctx.seed, i);
            for (std::int64_t x = 0; x < p; ++x)
                if (src.unit() < density) a.insert(x);
        }
        DecomposeOptions opt;
        if (q_min > 0) opt.q_min_override = q_min;
        opt.threads = ctx.effective_threads();
        const RegularityDecomposition dec = regularity_decompose(a, eps, opt);
        json jd;
        jd["stream"] = i;
        jd["p"] = p;
        jd["alpha"] = dec.alpha;
        jd["outcome"] = dec.outcome == DecomposeOutcome::Success     ? "success"
                        : dec.outcome == DecomposeOutcome::Saturated ? "saturated"
                        : dec.outcome == DecomposeOutcome::MaxSteps  ? "max_steps"
                                                                     : "stalled";
        jd["paper_q_regime"] = dec.paper_q_regime;
        json steps = json::array();
        for (const auto& st : dec.steps) {
            json js;
            js["t"] = st.t;
            js["lambda"] = st.lambda;
            js["q"] = st.q;
            js["L"] = st.cell_length;
            js["regular_fraction"] = st.regular_fraction;
            js["energy"] = st.step_energy.get_str();
            if (st.witness_theta) js["witness_theta"] = *st.witness_theta;
            if (st.dirichlet_d) js["d"] = *st.dirichlet_d;
            js["edge_tolerance"] = st.edge_tolerance;
            js["sigma_cap_max"] = st.sigma_cap_max;
            steps.push_back(js);
        }
        jd["steps"] = steps;
        runs.push_back(jd);
    }
    std::ofstream f(out);
    f << runs.dump(2) << "\n";
    ctx.outputs.push_back(out);
    std::cout << "runs=" << samples << "\n";
    return 0;
}

int run_dissociate(RunContext& ctx, std::int64_t n, std::int64_t k, std::int64_t M,
                   std::uint64_t samples) {
    // Draws random k-subsets of Z/NZ and compares the greedy maximal
    // M-dissociated subset size d against 2m/k (m = restricted sumset size).
    const std::string out = ctx.path("dissociate.csv");
    std::ofstream f(out);
    f << "stream,k,m,d,two_m_over_k,ratio\n";
    double max_ratio = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        SeededSource src(ctx.seed, i);
        GSet a(Ambient::cyclic(n));
        while (a.size() < k) a.insert(static_cast<std::int64_t>(src.below(n)));
        const std::int64_t m = sumset(a, /*restricted=*/true).size();
        const GSet x = max_dissociated_subset(a, M);
        const double benchmark = 2.0 * static_cast<double>(m) / static_cast<double>(k);
        const double ratio = static_cast<double>(x.size()) / benchmark;
        max_ratio = std::max(max_ratio, ratio);
        f << i << "," << k << "," << m << "," << x.size() << "," << benchmark << "," << ratio
          << "\n";
    }
    ctx.outputs.push_back(out);
    std::cout << "max d/(2m/k) ratio=" << max_ratio << "\n";
    return 0;
}

int run_cluster(RunContext& ctx, int n, double edge_p, double D, std::uint64_t samples) {
    const std::string out = ctx.path("cluster.csv");
    std::ofstream f(out);
    f << "stream,n,A_size,blocks,leftover,bound,max_diameter\n";
    for (std::uint64_t i = 0; i < samples; ++i) {
        SeededSource src(ctx.seed, i);
        SimpleGraph g(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (src.unit() < edge_p) g.add_edge(u, v);
        std::vector<int> a;
        for (int v = 0; v < n; ++v)
            if (src.coin()) a.push_back(v);
        const ClusterPartition part = cluster_decompose(g, a, D);
        const double bound = 32.0 * std::pow(static_cast<double>(a.size()) / D, 2.0);
        f << i << "," << n << "," << a.size() << "," << part.blocks.size() << ","
          << part.leftover.size() << "," << bound << "," << part.observed_max_diameter << "\n";
    }
    ctx.outputs.push_back(out);
    std::cout << "instances=" << samples << " all cluster properties verified\n";
    return 0;
}

int run_isoperimetry(RunContext& ctx, int d, std::int64_t size, bool hamming) {
    json row;
    row["schema_version"] = kSchemaVersion;
    row["d"] = d;
    if (hamming) {
        const auto ball = hamming_ball(d, 2);
        row["mode"] = "hamming_ball_radius_2";
        row["set_size"] = ball.size();
        row["expansion"] = grid_expansion(ball, d);
    } else {
        const auto seg = simplicial_initial_segment(d, size);
        const std::int64_t exp = grid_expansion(seg, d);
        row["mode"] = "initial_segment";
        row["set_size"] = size;
        row["expansion"] = exp;
        row["half_d_size"] = 0.5 * static_cast<double>(d) * static_cast<double>(size);
    }
    const std::string out = ctx.path("isoperimetry.jsonl");
    std::ofstream f(out);
    f << row.dump() << "\n";
    ctx.outputs.push_back(out);
    std::cout << row.dump() << "\n";
    return 0;
}

int run_cayley(RunContext& ctx, std::int64_t n, std::uint64_t samples, double eps,
               bool independence) {
    const CliqueStats stats =
        clique_experiment(n, samples, eps, ctx.seed, ctx.effective_threads());

    // Independence numbers come from the complement, which is the Cayley
    // sum graph of the complementary generator set.
    std::vector<int> alphas;
    if (independence) {
        alphas.resize(samples);
        for (std::uint64_t i = 0; i < samples; ++i) {
            SeededSource src(ctx.seed, i);
            GSet comp(Ambient::cyclic(n));
            for (std::int64_t x = 0; x < n; ++x)
                if (!src.coin()) comp.insert(x);
            alphas[i] = clique_number(build_cayley(comp));
        }
    }

    const std::string out = ctx.path("cayley.csv");
    std::ofstream f(out);
    f << "N,seed,stream,set_size,omega,threshold,violated";
    if (independence) f << ",alpha";
    f << "\n";
    for (std::size_t i = 0; i < stats.results.size(); ++i) {
        const auto& s = stats.results[i];
        f << n << "," << s.seed << "," << s.stream << "," << s.set_size << "," << s.omega << ","
          << stats.threshold << "," << (s.violated ? 1 : 0);
        if (independence) f << "," << alphas[i];
        f << "\n";
    }
    ctx.outputs.push_back(out);
    std::cout << "mean omega=" << stats.mean_omega << " violations=" << stats.violations << "/"
              << samples << " threshold=" << stats.threshold << "\n";
    return 0;
}

int run_missing(RunContext& ctx, std::int64_t s_max, std::uint64_t samples) {
    const MissingDistribution dist =
        missing_distribution(s_max, samples, ctx.seed, ctx.effective_threads());
    const std::string out = ctx.path("missing.csv");
    std::ofstream f(out);
    f << "s,count,a_hat,ci_lo,ci_hi,exponent_fit\n";
    for (const auto& b : dist.buckets)
        f << b.s << "," << b.count << "," << b.a_hat << "," << b.ci_lo << "," << b.ci_hi << ","
          << b.exponent_fit << "\n";
    ctx.outputs.push_back(out);
    std::cout << "samples=" << samples << " horizon=" << dist.horizon << "\n";
    return 0;
}

int run_selftest(RunContext& ctx);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "addcomb: additive-combinatorics workbench (sumsets, Pollard representation counts, "
        "Freiman dimension, interval regularity, dissociated sets, grid isoperimetry, random "
        "Cayley graph cliques, missing-sums statistics)"};
    app.require_subcommand(1);

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.push_back(argv[i]);
    const char* env_out = std::getenv("ADDCOMB_OUT");
    ctx.out_dir = env_out ? env_out : ".";

    app.add_option("--out", ctx.out_dir, "Output directory (env ADDCOMB_OUT)");
    app.add_option("--seed", ctx.seed, "Base seed for all randomness");
    app.add_option("--threads", ctx.threads, "Data-parallel width (0 = hardware)");

    // count
    auto* count = app.add_subcommand(
        "count", "Exact number of k-subsets with |A+A| <= m (or |A +^ A| with --restricted)");
    std::int64_t c_n = 10, c_lo = 1, c_k = 3, c_m = -1;
    std::string c_kind = "int";
    bool c_restricted = false;
    double c_K = 0, c_delta = 0, c_ceiling = 1e9;
    count->add_option("--N", c_n, "Ambient size");
    count->add_option("--lo", c_lo, "Interval start (int ambient)");
    count->add_option("--ambient", c_kind, "int | cyclic");
    count->add_option("--k", c_k, "Subset size");
    count->add_option("--m", c_m, "Sumset budget (-1 = unbounded, tabulate all sizes)");
    count->add_flag("--restricted", c_restricted, "Use the restricted sumset");
    count->add_option("--K", c_K, "Report the counting bound with this K");
    count->add_option("--delta", c_delta, "Counting-bound delta");
    count->add_option("--ceiling", c_ceiling, "Projected-node budget");

    // pollard
    auto* pollard = app.add_subcommand(
        "pollard", "Averaged Pollard inequality (N_1+...+N_t)/t >= min(2|S|,q)-t on random S in Z/qZ");
    std::int64_t p_q = 31;
    double p_beta = 0.5;
    std::uint64_t p_samples = 100;
    pollard->add_option("--q", p_q, "Prime modulus");
    pollard->add_option("--beta", p_beta, "beta in (0,1]");
    pollard->add_option("--samples", p_samples, "Random sets to draw");

    // freiman
    auto* freiman = app.add_subcommand(
        "freiman", "Freiman dimension (rational rank of the additive-quadruple system)");
    std::string f_elems = "0,1,3,7";
    std::string f_kind = "int";
    std::int64_t f_n = 64, f_lo = 0, f_homN = 0;
    freiman->add_option("--set", f_elems, "Comma-separated elements");
    freiman->add_option("--ambient", f_kind, "int | cyclic");
    freiman->add_option("--N", f_n, "Ambient size");
    freiman->add_option("--lo", f_lo, "Interval start");
    freiman->add_option("--homN", f_homN, "Also count homomorphisms into [1, homN]");
    std::int64_t f_dilates = 0;
    freiman->add_option("--dilates", f_dilates,
                        "Report dilates fitting a cyclic interval of length < this");

    // regularity
    auto* regularity = app.add_subcommand(
        "regularity", "Energy-increment interval-regularity decomposition of A in Z/pZ");
    std::int64_t r_p = 10007, r_qmin = 11, r_interval = 0;
    double r_eps = 0.3, r_density = 0.5;
    std::uint64_t r_samples = 1;
    regularity->add_option("--p", r_p, "Prime modulus");
    regularity->add_option("--eps", r_eps, "Regularity parameter in (0, 1/2)");
    regularity->add_option("--qmin", r_qmin, "Override the q >= 1/eps^10 lower bound (0 = paper value)");
    regularity->add_option("--density", r_density, "Random-set density");
    regularity->add_option("--interval", r_interval, "Use an interval [0, len) instead of a random set");
    regularity->add_option("--samples", r_samples, "Seeded runs");

    // dissociate
    auto* dissociate = app.add_subcommand(
        "dissociate", "Greedy maximal M-dissociated subsets of random sets, d vs 2m/k");
    std::int64_t d_n = 101, d_k = 12, d_m = 3;
    std::uint64_t d_samples = 50;
    dissociate->add_option("--N", d_n, "Cyclic modulus");
    dissociate->add_option("--k", d_k, "Set size");
    dissociate->add_option("--M", d_m, "Dissociation weight budget");
    dissociate->add_option("--samples", d_samples, "Random sets");

    // cluster
    auto* cluster = app.add_subcommand(
        "cluster", "Graph cluster decomposition: separated blocks, bounded diameter, small leftover");
    int cl_n = 128;
    double cl_p = 0.05, cl_D = 16;
    std::uint64_t cl_samples = 20;
    cluster->add_option("--n", cl_n, "Vertices");
    cluster->add_option("--p", cl_p, "Edge probability");
    cluster->add_option("--D", cl_D, "Diameter parameter (> 1)");
    cluster->add_option("--samples", cl_samples, "Instances");

    // isoperimetry
    auto* iso = app.add_subcommand(
        "isoperimetry", "Grid vertex expansion |S + {e_1..e_d}| of simplicial initial segments");
    int i_d = 10;
    std::int64_t i_size = 25;
    bool i_hamming = false;
    iso->add_option("--d", i_d, "Dimension");
    iso->add_option("--size", i_size, "Initial segment size");
    iso->add_flag("--hamming", i_hamming, "Use the radius-2 Hamming ball instead");

    // cayley
    auto* cayley = app.add_subcommand(
        "cayley", "Exact clique numbers of random Cayley sum graphs vs (2+eps) log2 N");
    std::int64_t cy_n = 101;
    std::uint64_t cy_samples = 50;
    double cy_eps = 1.0;
    cayley->add_option("--N", cy_n, "Cyclic modulus");
    cayley->add_option("--samples", cy_samples, "Random generator sets");
    cayley->add_option("--eps", cy_eps, "Threshold slack");
    bool cy_alpha = false;
    cayley->add_flag("--independence", cy_alpha,
                     "Also report independence numbers (cliques of the complement)");

    // missing
    auto* missing = app.add_subcommand(
        "missing", "Distribution of |{1..10 s_max} \\ (X+X)| for random X");
    std::int64_t m_smax = 14;
    std::uint64_t m_samples = 100000;
    missing->add_option("--smax", m_smax, "Largest tracked count (horizon = 10 s_max)");
    missing->add_option("--samples", m_samples, "Monte-Carlo samples");

    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    int rc = 1;
    try {
        if (count->parsed()) {
            ctx.subcommand = "count";
            ctx.flags = {{"N", c_n},      {"lo", c_lo},       {"ambient", c_kind},
                         {"k", c_k},      {"m", c_m},         {"restricted", c_restricted},
                         {"K", c_K},      {"delta", c_delta}, {"ceiling", c_ceiling}};
            rc = run_count(ctx, c_n, c_lo, c_kind, c_k, c_m, c_restricted, c_K, c_delta, c_ceiling);
        } else if (pollard->parsed()) {
            ctx.subcommand = "pollard";
            ctx.flags = {{"q", p_q}, {"beta", p_beta}, {"samples", p_samples}};
            rc = run_pollard(ctx, p_q, p_beta, p_samples);
        } else if (freiman->parsed()) {
            ctx.subcommand = "freiman";
            ctx.flags = {{"set", f_elems}, {"ambient", f_kind}, {"N", f_n}, {"lo", f_lo},
                         {"homN", f_homN}, {"dilates", f_dilates}};
            rc = run_freiman(ctx, f_elems, f_kind, f_n, f_lo, f_homN, f_dilates);
        } else if (regularity->parsed()) {
            ctx.subcommand = "regularity";
            ctx.flags = {{"p", r_p},           {"eps", r_eps},
                         {"qmin", r_qmin},     {"density", r_density},
                         {"interval", r_interval}, {"samples", r_samples}};
            rc = run_regularity(ctx, r_p, r_eps, r_qmin, r_density, r_interval, r_samples);
        } else if (dissociate->parsed()) {
            ctx.subcommand = "dissociate";
            ctx.flags = {{"N", d_n}, {"k", d_k}, {"M", d_m}, {"samples", d_samples}};
            rc = run_dissociate(ctx, d_n, d_k, d_m, d_samples);
        } else if (cluster->parsed()) {
            ctx.subcommand = "cluster";
            ctx.flags = {{"n", cl_n}, {"p", cl_p}, {"D", cl_D}, {"samples", cl_samples}};
            rc = run_cluster(ctx, cl_n, cl_p, cl_D, cl_samples);
        } else if (iso->parsed()) {
            ctx.subcommand = "isoperimetry";
            ctx.flags = {{"d", i_d}, {"size", i_size}, {"hamming", i_hamming}};
            rc = run_isoperimetry(ctx, i_d, i_size, i_hamming);
        } else if (cayley->parsed()) {
            ctx.subcommand = "cayley";
            ctx.flags = {{"N", cy_n}, {"samples", cy_samples}, {"eps", cy_eps},
                         {"independence", cy_alpha}};
            rc = run_cayley(ctx, cy_n, cy_samples, cy_eps, cy_alpha);
        } else if (missing->parsed()) {
            ctx.subcommand = "missing";
            ctx.flags = {{"smax", m_smax}, {"samples", m_samples}};
            rc = run_missing(ctx, m_smax, m_samples);
        } else if (selftest->parsed()) {
            ctx.subcommand = "selftest";
            rc = run_selftest(ctx);
        }
        ctx.write_manifest();
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << " (projection " << e.projection() << ")\n";
        return 3;
    } catch (const ScaleError& e) {
        std::cerr << "scale error: " << e.what() << " (minimum viable " << e.minimum_viable()
                  << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

namespace {

int run_selftest(RunContext& ctx) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    // Arithmetic substrate.
    check(next_prime(10) == 11 && next_prime(1) == 2 && next_prime(1000000) == 1000003,
          "next_prime values");
    {
        bool ok = true;
        for (std::int64_t p : {5, 7, 11, 101}) {
            for (std::int64_t x = 1; x < p; ++x)
                ok = ok && mod_inverse(mod_inverse(x, p), p) == x;
        }
        check(ok, "mod_inverse involution");
    }
    {
        SeededSource s1(42, 7), s2(42, 7);
        bool ok = true;
        for (int i = 0; i < 100000; ++i) ok = ok && s1.next_u64() == s2.next_u64();
        check(ok, "seeded source reproducibility");
    }

    // Sumset kernels.
    {
        GSet a(Ambient::interval(1, 10), {1, 2, 3});
        check(sumset(a, false).elements() == std::vector<std::int64_t>({2, 3, 4, 5, 6}),
              "plain sumset of an AP");
        check(sumset(a, true).elements() == std::vector<std::int64_t>({3, 4, 5}),
              "restricted sumset of an AP");
        GSet s(Ambient::cyclic(7), {0, 1, 3});
        const RepHistogram h = rep_histogram(s);
        check(h.N(1) == 6 && h.N(2) == 3 && h.N(3) == 0, "representation histogram");
    }
    {
        bool ok = true;
        for (std::int64_t q : {5, 7, 11}) {
            const std::uint64_t total = std::uint64_t{1} << q;
            for (std::uint64_t mask = 0; mask < total && ok; ++mask) {
                GSet s(Ambient::cyclic(q));
                for (std::int64_t x = 0; x < q; ++x)
                    if ((mask >> x) & 1) s.insert(x);
                const RepHistogram h = rep_histogram(s);
                const std::int64_t k = s.size();
                std::int64_t prefix = 0;
                for (std::int64_t t = 1; t <= q && ok; ++t) {
                    prefix += h.N(t);
                    ok = prefix >= t * (std::min(2 * k, q) - t);
                }
            }
        }
        check(ok, "Pollard averaged inequality, exhaustive small primes");
    }

    // Enumeration vs direct values.
    {
        CountQuery q{Ambient::interval(1, 10), 3, 5, false};
        check(count_small_sumset(q).exact_count == 20, "3-term APs in [1,10]");
    }
    {
        const FreimanDim d1 = freiman_dimension(GSet(Ambient::interval(0, 9),
                                                     {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
        const FreimanDim d2 = freiman_dimension(GSet(Ambient::interval(0, 9), {5}));
        const FreimanDim d3 = freiman_dimension(GSet(Ambient::interval(0, 7), {0, 1, 3, 7}));
        check(d1.r == 1 && d2.r == 0 && d3.r == 3, "Freiman dimensions");
    }
    {
        bool ok = true;
        SeededSource src(ctx.seed, 999);
        for (int i = 0; i < 2000; ++i) {
            const double theta = src.unit();
            const std::int64_t Q = 1 + static_cast<std::int64_t>(src.below(1000));
            const std::int64_t d = dirichlet_approx(theta, Q);
            ok = ok && d >= 1 && d <= Q;
        }
        check(ok, "dirichlet approximation in range (scan/convergent cross-check)");
    }
    check(l1_ball_count(2, 2) == 13 && l1_ball_count(1, 1) == 3 &&
              l1_ball_count_nonneg(2, 2) == 6,
          "l1 ball counts");
    {
        const auto ball = hamming_ball(10, 2);
        check(static_cast<std::int64_t>(ball.size()) == 66 && grid_expansion(ball, 10) == 285,
              "Hamming ball expansion");
    }
    {
        GSet a(Ambient::cyclic(7), {0, 1, 3});
        const CayleyGraph g = build_cayley(a);
        bool ok = true;
        for (std::int64_t x = 0; x < 7 && ok; ++x)
            for (std::int64_t y = 0; y < 7 && ok; ++y)
                ok = g.adjacent(x, y) == (x != y && a.contains(x + y));
        check(ok, "Cayley adjacency definition");
        const ExpectedCliqueCount ec = expected_clique_count(7, 2);
        check(ec.direct == make_rational(21, 2), "expected 2-clique count in Z/7Z");
    }
    {
        const IntervalSet full(Interval{0, 63},
                               [] {
                                   std::vector<std::int64_t> v;
                                   for (int i = 0; i < 64; ++i) v.push_back(i);
                                   return v;
                               }());
        check(regular_pair_test(full, full, 0.1).status == RegStatus::Regular,
              "full intervals are regular");
        const Rational e = energy(GSet(Ambient::cyclic(101),
                                       [] {
                                           std::vector<std::int64_t> v;
                                           for (int i = 0; i <= 40; ++i) v.push_back(i);
                                           return v;
                                       }()),
                                  1, 5);
        check(e == make_rational(2, 5), "two full cells of five");
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace
