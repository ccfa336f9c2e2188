// CLI-level checks: spawns the built binary and inspects outputs, exit codes
// and byte-level determinism. The binary path arrives as argv[1].

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;
std::string g_cli;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunResult run(const std::string& args) {
    const std::string out_path = "cli_stdout.txt", err_path = "cli_stderr.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

void check(bool cond, const std::string& what, const std::string& detail = "") {
    if (cond) {
        std::printf("[ok] %s\n", what.c_str());
    } else {
        std::printf("[FAILED] %s %s\n", what.c_str(), detail.c_str());
        ++g_failures;
    }
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_checks <path-to-becor>\n");
        return 1;
    }
    g_cli = argv[1];

    {
        auto r = run("breakeven --names 2 --beta 1,1 --spread-corr 0.3");
        check(r.exit_code == 0 && starts_with(r.out, "0.3\n"),
              "two-name break-even prints 0.30", r.out);
    }
    {
        auto r = run("price --fptd 1 --n 4 --rho 0 --q 0.95 --recovery 0");
        check(r.exit_code == 0 && starts_with(r.out, "0.18549375"),
              "independent FTD price", r.out);
    }
    {
        auto r = run("price --fptd 1 --n 2 --rho 0.4 --q 1.5 --recovery 0");
        check(r.exit_code == 2, "out-of-range survival exits 2",
              std::to_string(r.exit_code));
        check(r.err.find("error") != std::string::npos, "error goes to stderr", r.err);
    }
    {
        auto r = run("breakeven --names 2 --beta 1,1 --spread-corr -0.4 --q 0.9,0.8");
        check(r.exit_code == 3, "no-solution break-even exits 3",
              std::to_string(r.exit_code));
    }
    {
        auto r = run("price --worst-of 1 --puts 0.1,0.2 --rho 0.5");
        auto f = run("price --fptd 1 --n 2 --rho 0.5 --q 0.9,0.8 --recovery 0");
        check(r.exit_code == 0 && f.exit_code == 0 && r.out == f.out,
              "worst-of equals the mapped FTD", r.out + " vs " + f.out);
    }
    {
        auto a = run("simulate --scheme exact --n 2 --q 0.9,0.8 --sigma-bar 0.5 "
                     "--spread-corr 0.3 --steps 12 --t-end 0.5 --paths 4 --seed 9 "
                     "--out sim_a.csv");
        auto b = run("simulate --scheme exact --n 2 --q 0.9,0.8 --sigma-bar 0.5 "
                     "--spread-corr 0.3 --steps 12 --t-end 0.5 --paths 4 --seed 9 "
                     "--out sim_b.csv");
        check(a.exit_code == 0 && b.exit_code == 0 &&
                  slurp("sim_a.csv") == slurp("sim_b.csv") &&
                  !slurp("sim_a.csv").empty(),
              "simulate is byte-identical for a fixed seed");
        auto h = run("hedge --paths-csv sim_a.csv --fptd 1 --recovery 0 --rho 0.5 "
                     "--maturity 5 --out hedge_a.csv");
        check(h.exit_code == 0 && starts_with(slurp("hedge_a.csv"), "path,step,time"),
              "hedge consumes simulated paths", h.err);
        auto h2 = run("hedge --paths-csv sim_a.csv --fptd 1 --recovery 0 --rho 0.5 "
                      "--maturity 5 --out hedge_b.csv");
        check(h2.exit_code == 0 && slurp("hedge_a.csv") == slurp("hedge_b.csv"),
              "hedge output is deterministic");
    }
    {
        write_file("quotes.csv",
                   "date,name,maturity_years,hazard_rate,recovery\n"
                   "2024-01-02,acme,5,0.05,0.4\n"
                   "2024-01-02,bmeg,5,0.02,0.4\n"
                   "2024-01-09,acme,5,0.055,0.4\n"
                   "2024-01-09,bmeg,5,0.018,0.4\n"
                   "2024-01-16,acme,5,0.052,0.4\n"
                   "2024-01-16,bmeg,5,0.021,0.4\n");
        auto r = run("hedge --quotes-csv quotes.csv --fptd 1 --recovery 0.4 --rho 0.4 "
                     "--window 1 --out hedge_q.csv");
        check(r.exit_code == 0 && slurp("hedge_q.csv").find("0,2,") != std::string::npos,
              "hedge ingests quote files", r.err);
    }
    {
        write_file("becor.ini",
                   "[price]\n"
                   "fptd = 1\n"
                   "n = 4\n"
                   "q = 0.95\n"
                   "rho = 0\n"
                   "recovery = 0\n");
        auto r = run("--config becor.ini price");
        check(r.exit_code == 0 && starts_with(r.out, "0.18549375"),
              "config file supplies defaults", r.out);
        auto o = run("--config becor.ini price --q 0.9");
        check(o.exit_code == 0 && starts_with(o.out, "0.3439"),
              "command line overrides config", o.out);
        auto d = run("--config becor.ini --dump-config price");
        write_file("becor_dump.ini", d.out);
        auto rd = run("--config becor_dump.ini price");
        check(rd.exit_code == 0 && rd.out == r.out,
              "dumped config reproduces the run", rd.out);
        write_file("becor_bad.ini", "[price]\nunknown_key = 1\n");
        auto bad = run("--config becor_bad.ini price");
        check(bad.exit_code == 2 && bad.err.find("unknown key") != std::string::npos,
              "unknown config keys are rejected", bad.err);
    }
    {
        auto r = run("check-pde --kernel gauss --rho-list 0.45,0.65 --beta 0.8");
        check(r.exit_code == 0 && std::stod(r.out) < 1e-10,
              "matched gaussian replication residual is tiny", r.out);
        auto c = run("check-pde --kernel clayton --theta 0.7 --sigma0 0.5");
        check(c.exit_code == 0 && std::stod(c.out) < 1e-8,
              "matched clayton replication residual is tiny", c.out);
        auto off = run("check-pde --kernel clayton --theta 0.7 --sigma0 0.5 "
                       "--const-corr 0.5");
        check(off.exit_code == 0 && std::stod(off.out) > 1e-5,
              "constant-correlation Archimedean residual stays away from zero",
              off.out);
    }
    {
        auto r = run("matrix --sigma-bar 1,2 --spread-corr 1");
        check(r.exit_code == 0 && r.out.find("1,0.8\n") != std::string::npos,
              "matrix applies the 2 s_i s_j / (s_i^2+s_j^2) factor", r.out);
    }
    {
        auto r = run("scenario --table 1 --paths 2 --steps 10 --seed 5 "
                     "--mode instantaneous --out scen_a.csv");
        auto b = run("scenario --table 1 --paths 2 --steps 10 --seed 5 "
                     "--mode instantaneous --out scen_b.csv");
        check(r.exit_code == 0 && slurp("scen_a.csv") == slurp("scen_b.csv"),
              "scenario output is deterministic", r.err);
        auto s = run("scenario --skew beta --variant core --steps 4 --paths 1 "
                     "--out skew.csv");
        check(s.exit_code == 0 && slurp("skew.csv").find("order,beta_factor") == 0,
              "skew study emits per-order beta factors", s.err);
    }

    std::printf("%s: %d failure(s)\n", g_failures ? "FAILED" : "PASSED", g_failures);
    return g_failures ? 1 : 0;
}
