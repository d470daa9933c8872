#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "pswb/pswb.hpp"

using namespace pswb;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kUsage = 2, kViolated = 3, kGuard = 4;

struct Flags {
    std::string config, out, pgm, tau, kind, s_grid, cones, shells, map, against, seed, threads, matrix;
    std::vector<std::string> in, sets;
    bool exact = false;
    std::string name; // positional argument of corpus and symplectic
};

void add_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "key = value file");
    sub->add_option("--set", f.sets, "override a config key (key=value)");
    sub->add_option("--in", f.in, "input signal file or corpus name (repeat for a second input)");
    sub->add_option("--out", f.out, "output file or directory");
    sub->add_option("--pgm", f.pgm, "also write a PGM heatmap and a gnuplot script");
    sub->add_flag("--exact", f.exact, "exact rational arithmetic");
    sub->add_option("--tau", f.tau, "tau of the tau-Wigner distribution");
    sub->add_option("--kind", f.kind, "wigner | tau | stft | covariant");
    sub->add_option("--s-grid", f.s_grid, "comma separated Sobolev orders");
    sub->add_option("--cones", f.cones, "number of cones");
    sub->add_option("--shells", f.shells, "maximum number of dyadic shells");
    sub->add_option("--map", f.map, "matrix CSV");
    sub->add_option("--against", f.against, "reference wavefront report CSV");
    sub->add_option("--seed", f.seed, "seed for random inputs");
    sub->add_option("--threads", f.threads, "worker cap for the wavefront scan");
    sub->add_option("--matrix", f.matrix, "matrix CSV to test");
}

Config resolve(const Flags& f)
{
    Config c = f.config.empty() ? Config{} : Config::load(f.config);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
        c.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.in.empty()) c.set("in", f.in[0]);
    if (f.in.size() > 1) c.set("in2", f.in[1]);
    if (f.in.size() > 2) throw CLI::ValidationError("--in", "at most two inputs");
    const std::pair<const char*, const std::string*> direct[] = {
        {"out", &f.out},     {"pgm", &f.pgm},         {"tau", &f.tau},       {"kind", &f.kind},
        {"s_grid", &f.s_grid}, {"cones", &f.cones},   {"shells", &f.shells}, {"map", &f.map},
        {"against", &f.against}, {"seed", &f.seed},   {"threads", &f.threads}, {"matrix", &f.matrix}};
    for (const auto& [key, value] : direct)
        if (!value->empty()) c.set(key, *value);
    if (f.exact) c.set("exact", "true");
    return c;
}

void echo(const std::string& command, const Config& c)
{
    std::cout << "# " << command << '\n';
    std::istringstream lines(c.dump());
    for (std::string line; std::getline(lines, line);) std::cout << "#   " << line << '\n';
}

std::string require(const Config& c, const std::string& key)
{
    if (!c.has(key)) throw CLI::ValidationError(key, "missing required setting '" + key + "'");
    return c.get(key, "");
}

// ---- inputs ----

/// A file path, or a corpus name generated with N samples (default_n unless set).
Signal load_signal(const Config& c, const std::string& key, int default_n = 256)
{
    const std::string v = require(c, key);
    if (fs::exists(v)) return read_signal(v);
    const Grid g = Grid::self_dual(c.get_int("N", default_n));
    try {
        return corpus(v, g, c.get_double("chirp", 1.0));
    } catch (const ParseError&) {
        throw ParseError("'" + v + "' is neither a readable signal file nor a corpus name");
    }
}

MatD load_map(const Config& c, const std::string& key = "map") { return load_matrix<double>(require(c, key)); }

SympMat<double> load_symplectic(const Config& c, const std::string& key = "map") { return SympMat<double>(load_map(c, key)); }

/// Nearest-sample lookup in a tabulated symbol; zero off the table.
SymbolFn symbol_from_field(PhaseSpaceField F)
{
    return [F = std::move(F)](double x, double xi) -> cd {
        const int m = static_cast<int>(std::lround((x - F.x(0)) / F.dx));
        const int k = static_cast<int>(std::lround((xi - F.xi(0)) / F.dxi));
        if (m < 0 || m >= F.nx || k < 0 || k >= F.nxi) return 0.0;
        return F(m, k);
    };
}

SymbolFn named_symbol(const std::string& name)
{
    if (name == "none") return {};
    if (name == "one") return [](double, double) { return cd(1.0); };
    if (name == "gauss-bump") return [](double x, double xi) { return cd(std::exp(-kPi * (x * x + xi * xi))); };
    if (name == "offset-bump")
        return [](double x, double xi) { return cd(1.0 + 0.5 * std::exp(-(x - 0.5) * (x - 0.5) - (xi - 1) * (xi - 1))); };
    if (name == "wave-bump") return [](double x, double xi) { return cd(1.0 + 0.5 * std::sin(2 * x) * std::cos(xi)); };
    if (fs::exists(name)) return symbol_from_field(read_field_csv(name));
    throw ParseError("unknown symbol '" + name + "' (none, one, gauss-bump, offset-bump, wave-bump or a field CSV)");
}

TfrMap tfr_kind(const Config& c, const Grid& g)
{
    const std::string k = c.get("kind", "wigner");
    if (k == "wigner") return TfrMap::wigner(g);
    if (k == "tau") return TfrMap::tau_wigner(g, c.get_double("tau", 0.5));
    if (k == "stft") return TfrMap::stft(g);
    if (k == "covariant") return TfrMap::covariant(g, load_symplectic(c));
    throw ParseError("unknown kind '" + k + "' (wigner, tau, stft, covariant)");
}

WavefrontOptions wavefront_options(const Config& c)
{
    WavefrontOptions o;
    o.s_grid = c.get_list("s_grid", o.s_grid);
    o.max_shells = c.get_int("shells", o.max_shells);
    o.margin = c.get_double("margin", o.margin);
    o.threads = c.get_int("threads", o.threads);
    if (o.max_shells < o.min_shells)
        throw CLI::ValidationError("--shells", "needs at least " + std::to_string(o.min_shells) + " shells");
    return o;
}

ConeDecomposition cones_of(const Config& c) { return ConeDecomposition::standard(c.get_int("cones", 64)); }

/// The shells, orders and cones of a reference report, so a new report is comparable with it.
void adopt(const WaveFrontReport& R, WavefrontOptions& o, ConeDecomposition& cones)
{
    const auto& e = R.global.shell_radii;
    if (e.size() < 2) throw ParseError("reference report has no shells");
    o.s_grid = R.options.s_grid;
    o.margin = R.options.margin;
    o.r0 = e.front();
    o.ratio = e[1] / e[0];
    o.r_max = e.back();
    o.max_shells = static_cast<int>(e.size()) - 1;
    o.min_shells = std::min(o.min_shells, o.max_shells);
    cones = R.cones;
}

// ---- outputs ----

fs::path out_dir(const Config& c)
{
    fs::path d = c.get("out", ".");
    fs::create_directories(d);
    return d;
}

void write_gnuplot(const fs::path& script, const fs::path& csv, const std::string& title)
{
    std::ofstream g(script);
    if (!g) throw ParseError("cannot write " + script.string());
    g << "set datafile separator ','\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'x'\nset ylabel 'xi'\nset size ratio -1\nset view map\n"
      << "plot '" << csv.filename().string() << "' every ::1 using 3:4:(sqrt($5**2 + $6**2)) with image notitle\n";
}

void write_field(const Config& c, const PhaseSpaceField& F, const std::string& fallback, const std::string& title)
{
    const fs::path csv = c.get("out", fallback);
    if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
    write_field_csv(csv.string(), F);
    std::cout << "field: " << csv.string() << " (" << F.nx << " x " << F.nxi << ")\n";
    if (c.has("pgm")) {
        const fs::path pgm = c.get("pgm", "");
        write_field_pgm(pgm.string(), F);
        fs::path gp = pgm;
        gp.replace_extension(".gp");
        write_gnuplot(gp, csv, title);
        std::cout << "heatmap: " << pgm.string() << ", script: " << gp.string() << '\n';
    }
}

void write_signal_out(const Config& c, const Signal& s, const std::string& fallback)
{
    const fs::path p = c.get("out", fallback);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_signal(p.string(), s);
    std::cout << "signal: " << p.string() << " (N = " << s.size() << ")\n";
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream o(p);
    if (!o) throw ParseError("cannot write " + p.string());
    o << text;
}

void print_report(const WaveFrontReport& R, const std::string& label)
{
    std::cout << label << ": global order " << format_double(R.global_order()) << '\n';
    for (double s : R.options.s_grid) {
        std::cout << label << ": s = " << format_double(s) << " flagged cones {";
        bool first = true;
        for (int j : R.singular_set(s)) {
            std::cout << (first ? "" : ",") << j;
            first = false;
        }
        std::cout << "}\n";
    }
}

int verdict(const InclusionResult& r)
{
    std::cout << "inclusion: " << (r.holds ? "holds" : "violated") << '\n';
    for (const auto& [s, j] : r.violations) std::cerr << "violation: s = " << format_double(s) << ", cone " << j << '\n';
    return r.holds ? kOk : kViolated;
}

// ---- commands ----

int cmd_corpus(const Config& c, const std::string& name)
{
    if (name.empty()) {
        for (const auto& n : corpus_names()) std::cout << n << '\n';
        return kOk;
    }
    Signal s = corpus(name, Grid::self_dual(c.get_int("N", 256)), c.get_double("chirp", 1.0));
    write_signal_out(c, s, name + ".csv");
    return kOk;
}

int cmd_tfr(const std::string& which, const Config& c)
{
    const Signal f = load_signal(c, "in");
    const Signal g = c.has("in2") ? load_signal(c, "in2") : f;
    f.check_same(g);
    PhaseSpaceField F;
    if (which == "wigner") F = cross_wigner(f, g);
    else if (which == "tau") F = tau_wigner(f, g, c.get_double("tau", 0.5));
    else if (which == "stft") F = stft(f, c.has("window") ? load_signal(c, "window") : corpus("gaussian", f.grid));
    else if (which == "covariant") F = covariant_wa(f, g, load_symplectic(c));
    else F = husimi(f);
    write_field(c, F, which + ".csv", which);
    return kOk;
}

int cmd_metaplectic(const Config& c)
{
    const Signal f = load_signal(c, "in");
    const MetaplecticFactorization M = factorize(load_symplectic(c));
    std::cout << "word: " << M.str() << '\n';
    write_signal_out(c, apply(M, f), "metaplectic.csv");
    return kOk;
}

int cmd_weyl(const Config& c)
{
    const Signal f = load_signal(c, "in");
    const SymbolFn a = named_symbol(require(c, "symbol"));
    if (!a) throw ParseError("weyl needs a symbol other than none");
    const WeylOperator op = weyl_operator(a, f.grid);
    std::cout << "operator norm: " << format_double(operator_norm(op)) << '\n';
    write_signal_out(c, op.apply(f), "weyl.csv");
    return kOk;
}

int cmd_fio(const Config& c)
{
    const Signal f = load_signal(c, "in");
    const SymbolFn a = named_symbol(c.get("symbol", "one"));
    if (!a) throw ParseError("fio needs an amplitude other than none");
    write_signal_out(c, fio_apply(load_symplectic(c), a, f), "fio.csv");
    return kOk;
}

EvolutionSpec evolution_spec(const Config& c)
{
    EvolutionSpec s;
    s.a = QuadraticForm::from_coefficients(c.get_double("alpha", 0.0), c.get_double("beta", 0.0), c.get_double("gamma", 1.0));
    s.t_final = c.get_double("t", 0.5);
    s.n_steps = c.get_int("steps", 0);
    s.sigma = named_symbol(c.get("symbol", "none"));
    return s;
}

int cmd_evolve(const Config& c)
{
    const Signal u0 = load_signal(c, c.has("in") ? "in" : "signal", 512);
    const EvolutionSpec spec = evolution_spec(c);
    const bool over = c.get_bool("oversample", true);
    const PropagationResult r =
        propagation_experiment(spec, u0, tfr_kind(c, u0.grid), wavefront_options(c), cones_of(c), over);
    const fs::path d = out_dir(c);
    write_signal((d / "u0.csv").string(), r.u_in);
    write_signal((d / "u_t.csv").string(), r.u_out);
    save_matrix((d / "S_t.csv").string(), r.map.matrix());
    write_text(d / "report0.csv", r.report_in.csv());
    write_text(d / "report_t.csv", r.report_out.csv());
    std::cout << "wrote u0.csv, u_t.csv, S_t.csv, report0.csv, report_t.csv to " << d.string() << " (N = "
              << r.u_out.size() << ")\n";
    std::cout << "S_t:\n" << matrix_to_csv(r.map.matrix());
    print_report(r.report_in, "u0");
    print_report(r.report_out, "u_t");
    return verdict(r.verdict);
}

int cmd_wavefront(const Config& c)
{
    const Signal f = load_signal(c, "in", 512);
    WavefrontOptions o = wavefront_options(c);
    ConeDecomposition cones = cones_of(c);
    std::optional<WaveFrontReport> ref;
    if (c.has("against")) {
        ref = read_report_csv(c.get("against", ""));
        adopt(*ref, o, cones);
    } else if (c.has("map")) {
        throw CLI::ValidationError("--map", "a map needs a reference report (--against)");
    }
    // a reference report fixes the analysis window; otherwise f is a source signal
    const bool over = c.get_bool("oversample", !ref.has_value());
    const Signal u = over ? oversample2(f) : f;
    if (over) o = half_band(f.grid, o);
    const WaveFrontReport R = wavefront_report(tfr_kind(c, u.grid).forward(outer(u, u)), cones, o);
    const fs::path p = c.get("out", "report.csv");
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, R.csv());
    std::cout << "report: " << p.string() << '\n';
    print_report(R, "wf");
    std::cout << R.ascii_polar();
    if (!ref) return kOk;
    const MatD map = c.has("map") ? load_symplectic(c).matrix() : MatD::Identity(2, 2);
    return verdict(inclusion_check(R, *ref, map));
}

int cmd_ghost(const Config& c)
{
    const Signal f = load_signal(c, "in", 512), g = load_signal(c, "in2", 512);
    const GhostAnalysis G = ghost_analysis(f, g, cones_of(c), wavefront_options(c), c.get_bool("oversample", true));
    const fs::path d = out_dir(c);
    write_field_csv((d / "ghost.csv").string(), G.ghost);
    write_field_pgm((d / "ghost.pgm").string(), G.ghost);
    write_gnuplot(d / "ghost.gp", d / "ghost.csv", "2 Re W(f, g)");
    write_text(d / "report_f.csv", G.report_f.csv());
    write_text(d / "report_g.csv", G.report_g.csv());
    write_text(d / "report_sum.csv", G.report_sum.csv());
    write_text(d / "report_cross.csv", G.report_cross.csv());
    Eigen::Index m = 0, k = 0;
    G.ghost.values.cwiseAbs().maxCoeff(&m, &k);
    std::cout << "wrote ghost.csv, ghost.pgm, ghost.gp and four reports to " << d.string() << '\n';
    std::cout << "ghost peak: x = " << format_double(G.ghost.x(static_cast<int>(m)))
              << ", xi = " << format_double(G.ghost.xi(static_cast<int>(k)))
              << ", value = " << format_double(G.ghost(static_cast<int>(m), static_cast<int>(k)).real()) << '\n';
    print_report(G.report_sum, "f+g");
    return verdict(G.inclusion);
}

Signal random_signal(const Grid& g, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Signal s(g);
    for (auto& v : s.v) {
        const double re = n(rng);
        v = cd(re, n(rng));
    }
    return s;
}

DiscreteOperator operator_of(const Config& c, const Grid& g)
{
    const std::string op = c.get("operator", "fourier");
    if (op == "identity") return DiscreteOperator::identity(g);
    if (op == "fourier") return DiscreteOperator::fourier(g);
    if (op == "shift") return DiscreteOperator::tf_shift(g, c.get_int("shift", 1), c.get_int("mod", 1));
    if (op == "weyl") {
        const SymbolFn a = named_symbol(c.get("symbol", "gauss-bump"));
        if (!a) throw ParseError("weyl operator needs a symbol other than none");
        return DiscreteOperator::weyl(weyl_operator(a, g));
    }
    throw ParseError("unknown operator '" + op + "' (identity, fourier, shift, weyl)");
}

int cmd_kernel_check(const Config& c)
{
    const Grid g = Grid::self_dual(c.get_int("N", 16));
    std::mt19937_64 rng(static_cast<std::uint64_t>(c.get_int("seed", 1)));
    const Signal f = random_signal(g, rng), h = random_signal(g, rng);
    const DiscreteOperator T = operator_of(c, g);
    const TfrMap kind = tfr_kind(c, g);
    const double tol = c.get_double("tol", 1e-10);
    const double res = intertwining_residual(T, kind, f, h);
    std::cout << "kernel: " << kind.name() << " of " << c.get("operator", "fourier") << " on N = " << g.N << '\n';
    std::cout << "intertwining residual: " << format_double(res) << '\n';
    bool ok = res <= tol;
    std::optional<SympMat<double>> A;
    if (kind.kind == TfrMap::Tau) A = A_tau<double>(kind.tau);
    if (kind.kind == TfrMap::Wigner) A = A_tau<double>(0.5);
    if (kind.kind == TfrMap::Covariant) A = load_symplectic(c);
    const WignerKernel4D K = wigner_kernel(T, kind);
    if (A && g.N > 48) {
        std::cout << "covariant route: skipped above N = 48\n";
    } else if (A) {
        const double dual = relative_distance(doubled_covariance_kernel(*A, T), K);
        std::cout << "covariant route gap: " << format_double(dual) << '\n';
        ok = ok && dual <= tol;
    }
    if (c.has("out")) {
        write_kernel(c.get("out", ""), K, kind.name());
        std::cout << "kernel file: " << c.get("out", "") << " (+ .json sidecar)\n";
    }
    std::cout << "kernel-check: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kOk : kViolated;
}

int cmd_symplectic(const Config& c, const std::string& action)
{
    if (action == "check") {
        const std::string path = require(c, "matrix");
        bool ok;
        if (c.get_bool("exact", false)) {
            const Mat<Rational> S = load_matrix<Rational>(path);
            ok = is_symplectic(S);
            std::cout << "residual: " << format_double(symplectic_residual(S)) << '\n';
        } else {
            const MatD S = load_matrix<double>(path);
            ok = is_symplectic(S);
            std::cout << "residual: " << format_double(symplectic_residual(S)) << '\n';
        }
        std::cout << "symplectic: " << (ok ? "true" : "false") << '\n';
        return ok ? kOk : kViolated;
    }
    if (action == "flow") {
        const EvolutionSpec s = evolution_spec(c);
        const MatD S = hamilton_flow(s.a, s.t_final).matrix();
        std::cout << matrix_to_csv(S);
        if (c.has("out")) save_matrix(c.get("out", ""), S);
        return kOk;
    }
    if (action == "random") {
        std::mt19937_64 rng(static_cast<std::uint64_t>(c.get_int("seed", 1)));
        const Mat<Rational> S = random_symplectic(rng, c.get_int("n", 1), c.get_int("length", 8)).matrix();
        std::cout << matrix_to_csv(S);
        if (c.has("out")) save_matrix(c.get("out", ""), S);
        return kOk;
    }
    throw CLI::ValidationError("symplectic", "action must be check, flow or random");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase-space workbench: time-frequency representations, metaplectic operators and wavefront reports"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"corpus", "write a named test signal (no name lists them)"},
        {"wigner", "Wigner distribution (cross with a second --in)"},
        {"stft", "short-time Fourier transform with a Gaussian window"},
        {"tau", "tau-Wigner distribution"},
        {"covariant", "covariant representation of a 4x4 projection (--map)"},
        {"husimi", "Husimi distribution"},
        {"metaplectic", "apply the metaplectic operator of --map"},
        {"weyl", "apply the Weyl quantization of the symbol setting"},
        {"fio", "apply the quadratic FIO of --map with the symbol setting as amplitude"},
        {"evolve", "evolve by a quadratic Hamiltonian plus a perturbation and check propagation"},
        {"wavefront", "wavefront report; with --against, the inclusion verdict"},
        {"ghost", "cross-term analysis of two signals"},
        {"kernel-check", "Wigner kernel intertwining check"},
        {"symplectic", "symplectic matrix utilities: check, flow, random"}};
    std::map<CLI::App*, std::string> names;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_flags(sub, flags);
        if (name == "corpus" || name == "symplectic") sub->add_option("name", flags.name, name == "corpus" ? "signal name" : "action");
        names[sub] = name;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    const std::string cmd = names.at(app.get_subcommands().front());
    try {
        const Config c = resolve(flags);
        echo(cmd + (flags.name.empty() ? "" : " " + flags.name), c);
        if (cmd == "corpus") return cmd_corpus(c, flags.name);
        if (cmd == "wigner" || cmd == "stft" || cmd == "tau" || cmd == "covariant" || cmd == "husimi") return cmd_tfr(cmd, c);
        if (cmd == "metaplectic") return cmd_metaplectic(c);
        if (cmd == "weyl") return cmd_weyl(c);
        if (cmd == "fio") return cmd_fio(c);
        if (cmd == "evolve") return cmd_evolve(c);
        if (cmd == "wavefront") return cmd_wavefront(c);
        if (cmd == "ghost") return cmd_ghost(c);
        if (cmd == "kernel-check") return cmd_kernel_check(c);
        return cmd_symplectic(c, flags.name);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const AliasingRisk& e) {
        std::cerr << "numeric guard: " << e.what() << '\n';
        return kGuard;
    } catch (const TooFewShells& e) {
        std::cerr << "numeric guard: " << e.what() << '\n';
        return kGuard;
    } catch (const SizeOverflow& e) {
        std::cerr << "numeric guard: " << e.what() << '\n';
        return kGuard;
    } catch (const ConvergenceError& e) {
        std::cerr << "numeric guard: " << e.what() << '\n';
        return kGuard;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
