// becor: factor-copula basket pricing, break-even correlation and
// delta-hedging backtest command line.
//
// Exit codes: 0 success, 2 domain/usage error, 3 break-even has no solution.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "becor/becor.hpp"

namespace {

using namespace becor;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitNoSolution = 3;

// ---------------------------------------------------------------------------
// config/flag merge: command-line wins, then the [subcommand] section of
// --config, then the built-in default. Values travel as strings so the
// effective configuration can be dumped and re-parsed losslessly.

struct Resolver {
    CLI::App* cmd = nullptr;
    std::optional<ConfigSectionReader> cfg;
    std::vector<RunConfig::Entry> effective;

    std::string get(const std::string& flag, const std::string& key,
                    const std::string& fallback) {
        std::string value = fallback;
        if (cfg && cfg->has(key)) value = cfg->get(key);
        const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
        if (opt && opt->count() > 0) value = opt->as<std::string>();
        effective.push_back({key, value});
        return value;
    }
    double number(const std::string& flag, const std::string& key, double fallback) {
        return parse_number(get(flag, key, format_number(fallback)), "option " + key);
    }
    std::vector<double> list(const std::string& flag, const std::string& key,
                             const std::string& fallback) {
        return parse_number_list(get(flag, key, fallback), "option " + key);
    }
};

std::optional<RunConfig> g_config;
bool g_dump_config = false;

Resolver make_resolver(CLI::App* cmd, const std::set<std::string>& known) {
    Resolver r;
    r.cmd = cmd;
    if (g_config) r.cfg.emplace(*g_config, cmd->get_name(), known);
    return r;
}

int finish(Resolver& r) {
    if (!g_dump_config) return kExitOk;
    RunConfig out;
    out.sections.push_back({r.cmd->get_name(), r.effective});
    std::cout << emit_config(out);
    return kExitOk;
}

// replicate a single value across n names
std::vector<double> broadcast(std::vector<double> v, std::size_t n,
                              const std::string& what) {
    if (v.size() == 1 && n > 1) v.assign(n, v[0]);
    if (v.size() != n)
        throw DomainError(what + ": expected 1 or " + std::to_string(n) + " values");
    return v;
}

Eigen::MatrixXd corr_from_options(const std::string& flat, const std::string& csv,
                                  std::size_t n) {
    if (!csv.empty()) {
        // correlation CSV: square numeric grid, no header row
        std::ifstream in(csv);
        if (!in) throw DomainError("cannot open correlation file '" + csv + "'");
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (RunConfig::trim(line).empty()) continue;
            std::vector<double> row;
            for (const auto& f : split_csv_line(line))
                row.push_back(parse_number(f, "correlation entry"));
            rows.push_back(std::move(row));
        }
        const auto mat = to_matrix(rows);
        require_shape(mat.rows() == static_cast<Eigen::Index>(n),
                      "correlation matrix size disagrees with the basket");
        return mat;
    }
    const double rho = parse_number(flat, "spread correlation");
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
    m.diagonal().setOnes();
    return m;
}

CopulaSpec copula_from(Resolver& r, std::size_t n) {
    const std::string theta = r.get("clayton-theta", "clayton_theta", "");
    const std::string rho_list = r.get("rho-list", "rho_list", "");
    const std::string rho = r.get("rho", "rho", "");
    if (!theta.empty())
        return CopulaSpec::clayton(n, parse_number(theta, "clayton theta"));
    if (!rho_list.empty())
        return CopulaSpec::gauss_1f(
            broadcast(parse_number_list(rho_list, "rho list"), n, "rho list"));
    if (!rho.empty())
        return CopulaSpec::gauss_flat(n, parse_number(rho, "rho"));
    throw DomainError("specify a pricing copula: --rho, --rho-list or --clayton-theta");
}

MarketState market_from(Resolver& r) {
    const auto n = static_cast<std::size_t>(r.number("n", "n", 0));
    require_domain(n >= 1, "need --n >= 1");
    auto q = broadcast(r.list("q", "q", ""), n, "--q");
    const double recovery = r.number("recovery", "recovery", 0.0);
    const double maturity = r.number("maturity", "maturity", 5.0);
    const double t = r.number("t", "t", 0.0);
    return make_market(std::move(q), recovery, maturity, t);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------------------

int cmd_price(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"fptd", "worst_of", "puts", "n", "q", "recovery",
                                 "maturity", "t", "rho", "rho_list", "clayton_theta",
                                 "nodes", "out"});
    const bool worst_of = r.get("worst-of", "worst_of", "0") == "1";
    const int nodes = static_cast<int>(r.number("nodes", "nodes", 0));
    std::string text;
    if (worst_of) {
        const auto puts = r.list("puts", "puts", "");
        const auto copula = copula_from(r, puts.size());
        const std::string out_path = r.get("out", "out", "");
        if (g_dump_config) return finish(r);
        text = format_number(price_worst_of_digital(puts, copula, {.n_nodes = nodes})) +
               "\n";
        write_text(out_path, text);
    } else {
        const int p = static_cast<int>(r.number("fptd", "fptd", 1));
        const auto market = market_from(r);
        const auto copula = copula_from(r, market.size());
        const std::string out_path = r.get("out", "out", "");
        if (g_dump_config) return finish(r);
        text = format_number(price_fptd(p, market, copula, {.n_nodes = nodes}).value) +
               "\n";
        write_text(out_path, text);
    }
    return finish(r);
}

int cmd_deltas(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"fptd", "n", "q", "recovery", "maturity", "t", "rho",
                                 "rho_list", "clayton_theta", "mode", "nodes", "out"});
    const int p = static_cast<int>(r.number("fptd", "fptd", 1));
    const auto market = market_from(r);
    const auto copula = copula_from(r, market.size());
    const std::string mode = r.get("mode", "mode", "analytic");
    const int nodes = static_cast<int>(r.number("nodes", "nodes", 0));
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    const auto d = deltas(BasketPayoff::fptd(static_cast<int>(market.size()), p,
                                             market.recovery.front()),
                          market, copula,
                          mode == "bump" ? DeltaMode::Bump : DeltaMode::Analytic,
                          {.n_nodes = nodes});
    std::string text = "name,dv_dq\n";
    for (std::size_t i = 0; i < d.values.size(); ++i)
        text += "name" + std::to_string(i) + "," + format_number(d.values[i]) + "\n";
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
    write_text(out_path, text);
    return finish(r);
}

int cmd_drift(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"fptd", "n", "q", "recovery", "maturity", "t", "rho",
                                 "rho_list", "clayton_theta", "betas", "spread_corr",
                                 "spread_corr_csv", "nodes", "out"});
    const int p = static_cast<int>(r.number("fptd", "fptd", 1));
    const auto market = market_from(r);
    const auto copula = copula_from(r, market.size());
    const auto betas = broadcast(r.list("betas", "betas", "1"), market.size(), "--betas");
    const auto corr = corr_from_options(r.get("spread-corr", "spread_corr", "0"),
                                        r.get("spread-corr-csv", "spread_corr_csv", ""),
                                        market.size());
    const int nodes = static_cast<int>(r.number("nodes", "nodes", 0));
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    const auto rep = drift_fptd(p, market, copula, betas, corr, {.n_nodes = nodes});
    std::string text = "i,j,pair_term\n";
    for (const auto& [ij, v] : rep.pair_terms)
        text += std::to_string(ij.first) + "," + std::to_string(ij.second) + "," +
                format_number(v) + "\n";
    text += "eta,," + format_number(rep.eta) + "\n";
    text += "total,," + format_number(rep.total) + "\n";
    write_text(out_path, text);
    return finish(r);
}

int cmd_breakeven(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"names", "beta", "spread_corr", "spread_corr_csv", "q",
                                 "fptd", "recovery", "maturity", "nodes", "out"});
    const auto n = static_cast<std::size_t>(r.number("names", "names", 0));
    require_domain(n >= 2, "need --names >= 2");
    const auto betas = broadcast(r.list("beta", "beta", "1"), n, "--beta");
    const auto corr = corr_from_options(r.get("spread-corr", "spread_corr", "0"),
                                        r.get("spread-corr-csv", "spread_corr_csv", ""),
                                        n);
    const std::string q_text = r.get("q", "q", "");
    const int p = static_cast<int>(r.number("fptd", "fptd", 1));
    const double recovery = r.number("recovery", "recovery", 0.0);
    const double maturity = r.number("maturity", "maturity", 5.0);
    const int nodes = static_cast<int>(r.number("nodes", "nodes", 0));
    std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    if (q_text.empty()) {
        // homogeneous closed form
        write_text(out_path,
                   format_number(breakeven_weighted_closed_form(betas, corr)) + "\n");
        return finish(r);
    }
    const auto market = make_market(broadcast(parse_number_list(q_text, "--q"), n, "--q"),
                                    recovery, maturity);
    const auto res = solve_breakeven_flat(p, market, betas, corr, {.n_nodes = nodes});
    if (!res.found) {
        std::cerr << "no break-even correlation in the bracket: " << res.message
                  << " (drift at ends " << format_number(res.drift_lo) << ", "
                  << format_number(res.drift_hi) << ")\n";
        return kExitNoSolution;
    }
    write_text(out_path, format_number(res.rho2) + "\n");
    return finish(r);
}

int cmd_matrix(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"sigma_bar", "spread_corr", "spread_corr_csv", "rank",
                                 "out"});
    const auto sigma_bar = r.list("sigma-bar", "sigma_bar", "");
    const auto corr = corr_from_options(r.get("spread-corr", "spread_corr", "0"),
                                        r.get("spread-corr-csv", "spread_corr_csv", ""),
                                        sigma_bar.size());
    const int rank = static_cast<int>(r.number("rank", "rank", 0));
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    const auto bm = build_breakeven_matrix(sigma_bar, corr,
                                           rank > 0 ? std::optional<int>(rank)
                                                    : std::nullopt);
    std::string text = "# sigma_tilde\n";
    for (Eigen::Index i = 0; i < bm.sigma_tilde.rows(); ++i) {
        for (Eigen::Index j = 0; j < bm.sigma_tilde.cols(); ++j)
            text += (j ? "," : "") + format_number(bm.sigma_tilde(i, j));
        text += "\n";
    }
    text += "# rank_detected," + std::to_string(bm.rank_detected) + "\n";
    if (bm.factor_loadings) {
        text += "# loadings\n";
        for (Eigen::Index i = 0; i < bm.factor_loadings->rows(); ++i) {
            for (Eigen::Index j = 0; j < bm.factor_loadings->cols(); ++j)
                text += (j ? "," : "") + format_number((*bm.factor_loadings)(i, j));
            text += "\n";
        }
        text += "# residual," + format_number(bm.residual) + "\n";
    }
    write_text(out_path, text);
    return finish(r);
}

int cmd_simulate(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"scheme", "n", "q", "recovery", "maturity", "t",
                                 "sigma_bar", "xi", "alpha", "theta", "sigma0",
                                 "spread_corr", "spread_corr_csv", "steps", "t_end",
                                 "paths", "seed", "out"});
    const std::string scheme = r.get("scheme", "scheme", "exact");
    const auto market = market_from(r);
    const int steps = static_cast<int>(r.number("steps", "steps", 180));
    const double t_end = r.number("t-end", "t_end", 0.5);
    const auto n_paths = static_cast<std::size_t>(r.number("paths", "paths", 100));
    const auto seed = static_cast<std::uint64_t>(r.number("seed", "seed", 1234));
    const double theta = r.number("theta", "theta", 0.5);
    const double sigma0 = r.number("sigma0", "sigma0", 0.5);
    const auto sigma_bar = broadcast(r.list("sigma-bar", "sigma_bar", "0.5"),
                                     market.size(), "--sigma-bar");
    const std::string xi = r.get("xi", "xi", "merton");
    const double alpha = r.number("alpha", "alpha", 0.25);
    const auto corr = corr_from_options(
        r.get("spread-corr", "spread_corr", "0"),
        r.get("spread-corr-csv", "spread_corr_csv", ""), market.size());
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);

    const auto grid = uniform_grid(market.t, t_end, steps);
    PathSet ps;
    if (scheme == "clayton") {
        ps = simulate_clayton(theta, sigma0, market, grid, n_paths, seed);
    } else {
        DynamicsSpec dyn;
        dyn.sigma_bar = sigma_bar;
        dyn.xi = xi == "power" ? XiFunction::power_alpha(market.maturity, alpha)
                               : XiFunction::merton(market.maturity);
        dyn.spread_corr = corr;
        ps = scheme == "euler" ? simulate_euler(dyn, market, grid, n_paths, seed)
                               : simulate_exact(dyn, market, grid, n_paths, seed);
    }
    if (ps.clamp_warning())
        std::cerr << "warning: clamp rate " << format_number(ps.clamp_rate())
                  << " exceeds 1%\n";
    std::ostringstream os;
    write_paths_csv(os, ps, market.names);
    write_text(out_path, os.str());
    return finish(r);
}

int cmd_hedge(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"paths_csv", "quotes_csv", "dt", "fptd", "recovery",
                                 "maturity", "rho", "rho_list", "clayton_theta",
                                 "window", "nodes", "out"});
    const std::string paths_csv = r.get("paths-csv", "paths_csv", "");
    const std::string quotes_csv = r.get("quotes-csv", "quotes_csv", "");
    const int p = static_cast<int>(r.number("fptd", "fptd", 1));
    const double recovery = r.number("recovery", "recovery", 0.0);
    double maturity = r.number("maturity", "maturity", 5.0);
    const int window = static_cast<int>(r.number("window", "window", 6));
    const int nodes = static_cast<int>(r.number("nodes", "nodes", 0));

    PathSet ps;
    if (!paths_csv.empty()) {
        ps = read_paths_csv(read_csv_file(paths_csv));
    } else if (!quotes_csv.empty()) {
        // historical quotes become a single path; rows are dt apart
        const double dt = r.number("dt", "dt", 1.0 / 52.0);
        const auto qs = ingest_quotes(read_csv_file(quotes_csv));
        require_domain(!qs.markets.empty(), "quote file produced no market states");
        ps.n_paths = 1;
        ps.n_names = qs.markets.front().size();
        maturity = qs.markets.front().maturity;
        for (std::size_t d = 0; d < qs.markets.size(); ++d) {
            require_shape(qs.markets[d].size() == ps.n_names,
                          "quote dates disagree on the name set");
            ps.times.push_back(d * dt);
            for (std::size_t i = 0; i < ps.n_names; ++i)
                ps.q.push_back(qs.markets[d].survival[i]);
        }
    } else {
        throw DomainError("hedge needs --paths-csv or --quotes-csv");
    }

    const auto copula = copula_from(r, ps.n_names);
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    const auto market0 = make_market(
        std::vector<double>(ps.q.begin(), ps.q.begin() + ps.n_names), recovery, maturity,
        ps.times.front());
    const auto led =
        run_hedge(ps, BasketPayoff::fptd(static_cast<int>(ps.n_names), p, recovery),
                  copula, market0, {.n_nodes = nodes, .window_steps = window});

    std::string text = "path,step,time,value,cash,pnl\n";
    for (std::size_t pa = 0; pa < led.n_paths; ++pa)
        for (std::size_t m = 0; m < led.times.size(); ++m)
            text += std::to_string(pa) + "," + std::to_string(m) + "," +
                    format_number(led.times[m]) + "," + format_number(led.value_at(pa, m)) +
                    "," + format_number(led.cash_at(pa, m)) + "," +
                    format_number(led.pnl_at(pa, m)) + "\n";
    write_text(out_path, text);

    long double acc = 0.0L, acc2 = 0.0L;
    for (std::size_t pa = 0; pa < led.n_paths; ++pa) {
        const double v = led.pnl_at(pa, led.times.size() - 1);
        acc += v;
        acc2 += static_cast<long double>(v) * v;
    }
    const double mean = static_cast<double>(acc / led.n_paths);
    const double var = static_cast<double>(acc2 / led.n_paths) - mean * mean;
    std::cerr << "final pnl mean " << format_number(mean) << " sd "
              << format_number(std::sqrt(std::max(var, 0.0))) << " over " << led.n_paths
              << " paths\n";
    return finish(r);
}

int cmd_scenario(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"table", "skew", "variant", "paths", "steps", "seed",
                                 "nodes", "mode", "threads", "out"});
    const std::string skew = r.get("skew", "skew", "");
    const char* env_threads = std::getenv("BECOR_THREADS");
    const int threads = static_cast<int>(
        r.number("threads", "threads", env_threads ? std::atoi(env_threads) : 1));
    if (!skew.empty()) {
        SkewStudyConfig cfg;
        cfg.dimension = skew == "vol" ? ScenarioDimension::SpreadVol
                        : skew == "intensity" ? ScenarioDimension::Intensity
                                              : ScenarioDimension::BetaFactor;
        const std::string variant = r.get("variant", "variant", "core");
        cfg.variant = variant == "up" ? ScenarioVariant::Up
                      : variant == "down" ? ScenarioVariant::Down
                                          : ScenarioVariant::Core;
        cfg.steps = static_cast<int>(r.number("steps", "steps", 180));
        cfg.n_paths = static_cast<std::size_t>(r.number("paths", "paths", 1));
        cfg.seed = static_cast<std::uint64_t>(r.number("seed", "seed", 1234));
        cfg.n_nodes = static_cast<int>(r.number("nodes", "nodes", 64));
        const std::string out_path = r.get("out", "out", "");
        if (g_dump_config) return finish(r);
        const auto res = run_skew_study(cfg);
        std::string text = "order,beta_factor\n";
        for (std::size_t k = 0; k < res.orders.size(); ++k)
            text += std::to_string(res.orders[k]) + "," +
                    format_number(res.beta_factor[k]) + "\n";
        write_text(out_path, text);
        return finish(r);
    }

    const int table = static_cast<int>(r.number("table", "table", 1));
    require_domain(table >= 1 && table <= 3, "--table must be 1, 2 or 3");
    TableStudyConfig cfg;
    cfg.order = table;
    cfg.n_paths = static_cast<std::size_t>(r.number("paths", "paths", 100));
    cfg.steps = static_cast<int>(r.number("steps", "steps", 180));
    cfg.window_steps = cfg.steps;  // whole-horizon break-even averaging
    cfg.seed = static_cast<std::uint64_t>(r.number("seed", "seed", 1234));
    cfg.n_nodes = static_cast<int>(r.number("nodes", "nodes", 64));
    cfg.n_threads = threads;
    const std::string mode = r.get("mode", "mode", "empirical");
    cfg.with_empirical = mode != "instantaneous";
    cfg.with_instantaneous = mode != "empirical";
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    const auto res = run_table_study(cfg);
    const Eigen::MatrixXd& grid_out =
        cfg.with_empirical ? res.empirical : res.instantaneous;
    std::string text = "lam34/lam12";
    for (double l : res.intensity_grid) text += "," + format_number(l);
    text += "\n";
    for (Eigen::Index rr = 0; rr < grid_out.rows(); ++rr) {
        text += format_number(res.intensity_grid[rr]);
        for (Eigen::Index cc = 0; cc < grid_out.cols(); ++cc)
            text += "," + format_number(grid_out(rr, cc));
        text += "\n";
    }
    write_text(out_path, text);
    return finish(r);
}

int cmd_check_pde(CLI::App* cmd) {
    auto r = make_resolver(cmd, {"kernel", "rho_list", "beta", "theta", "sigma0",
                                 "const_corr", "out"});
    const std::string kernel_name = r.get("kernel", "kernel", "gauss");
    const std::string const_corr = r.get("const-corr", "const_corr", "");
    const double theta = r.number("theta", "theta", 0.7);
    const double sigma0 = r.number("sigma0", "sigma0", 0.5);
    const auto load = broadcast(r.list("rho-list", "rho_list", "0.5"), 2, "--rho-list");
    const double beta = r.number("beta", "beta", 0.8);
    const std::string out_path = r.get("out", "out", "");
    if (g_dump_config) return finish(r);
    double residual = 0.0;
    const auto q_grid = linspace(0.1, 0.9, 9);
    if (kernel_name == "clayton") {
        const auto kernel = make_clayton_kernel(theta, 2);
        auto beta_c = [theta](double q) {
            return std::sqrt(1.0 - std::pow(1.0 - q, theta));
        };
        auto sigma = [&](std::size_t, double q) { return sigma0 * (1.0 - q) * beta_c(q); };
        std::function<double(std::size_t, std::size_t, double, double)> rho;
        if (const_corr.empty()) {
            rho = [&beta_c](std::size_t, std::size_t, double qi, double qj) {
                return beta_c(qi) * beta_c(qj);
            };
        } else {
            const double c = parse_number(const_corr, "--const-corr");
            rho = [c](std::size_t, std::size_t, double, double) { return c; };
        }
        residual = check_replication_pde(kernel, sigma, rho, q_grid,
                                         linspace(0.05, 12.0, 60));
    } else {
        const auto kernel = make_gauss1f_kernel(CopulaSpec::gauss_1f(load));
        auto sigma = [beta](std::size_t, double q) { return sigma_from_beta(beta, q); };
        std::function<double(std::size_t, std::size_t, double, double)> rho;
        if (const_corr.empty()) {
            rho = [load](std::size_t i, std::size_t j, double, double) {
                return load[i] * load[j];
            };
        } else {
            const double c = parse_number(const_corr, "--const-corr");
            rho = [c](std::size_t, std::size_t, double, double) { return c; };
        }
        residual =
            check_replication_pde(kernel, sigma, rho, q_grid, linspace(-4.0, 4.0, 41));
    }
    write_text(out_path, format_number(residual) + "\n");
    return finish(r);
}

void add_string_opt(CLI::App* cmd, const std::string& flag) {
    cmd->add_option("--" + flag, "")->type_name("TEXT")->expected(1);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"factor-copula basket pricing, break-even correlation and "
                 "delta-hedging backtests"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "load defaults from the [subcommand] section of a key = value file");
    app.add_flag("--dump-config", g_dump_config,
                 "print the effective configuration and exit");

    struct Sub {
        const char* name;
        const char* help;
        std::vector<const char*> flags;
        int (*run)(CLI::App*);
    };
    const std::vector<Sub> subs = {
        {"price", "price an FpTD basket or a worst-of digital put",
         {"fptd", "worst-of", "puts", "n", "q", "recovery", "maturity", "t", "rho",
          "rho-list", "clayton-theta", "nodes", "out"},
         cmd_price},
        {"deltas", "per-name dV/dQ sensitivities",
         {"fptd", "n", "q", "recovery", "maturity", "t", "rho", "rho-list",
          "clayton-theta", "mode", "nodes", "out"},
         cmd_deltas},
        {"drift", "hedging-error drift of a delta-hedged FpTD",
         {"fptd", "n", "q", "recovery", "maturity", "t", "rho", "rho-list",
          "clayton-theta", "betas", "spread-corr", "spread-corr-csv", "nodes", "out"},
         cmd_drift},
        {"breakeven", "flat break-even correlation (closed form or solver)",
         {"names", "beta", "spread-corr", "spread-corr-csv", "q", "fptd", "recovery",
          "maturity", "nodes", "out"},
         cmd_breakeven},
        {"matrix", "break-even correlation matrix and factor loadings",
         {"sigma-bar", "spread-corr", "spread-corr-csv", "rank", "out"},
         cmd_matrix},
        {"simulate", "simulate survival-probability paths",
         {"scheme", "n", "q", "recovery", "maturity", "t", "sigma-bar", "xi", "alpha",
          "theta", "sigma0", "spread-corr", "spread-corr-csv", "steps", "t-end", "paths",
          "seed", "out"},
         cmd_simulate},
        {"hedge", "delta-hedging P&L over paths or quotes",
         {"paths-csv", "quotes-csv", "dt", "fptd", "recovery", "maturity", "rho",
          "rho-list", "clayton-theta", "window", "nodes", "out"},
         cmd_hedge},
        {"scenario", "intensity-grid tables and ten-name skew studies",
         {"table", "skew", "variant", "paths", "steps", "seed", "nodes", "mode",
          "threads", "out"},
         cmd_scenario},
        {"check-pde", "max residual of the replication identity on a grid",
         {"kernel", "rho-list", "beta", "theta", "sigma0", "const-corr", "out"},
         cmd_check_pde},
    };
    for (const auto& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        for (const char* f : sub.flags) add_string_opt(cmd, f);
    }

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw becor::DomainError("cannot open config '" + config_path + "'");
            g_config = becor::parse_config(in);
        }
        for (const auto& sub : subs)
            if (app.get_subcommand(sub.name)->parsed())
                return sub.run(app.get_subcommand(sub.name));
        return kExitDomain;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const becor::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const becor::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const becor::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
