#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tfr.hpp"
#include "weyl.hpp"

namespace pswb {

/// n cones with centers 2 pi j / n (angle atan2(xi, x)); membership is the half-open arc
/// [center - half_width, center + half_width).
struct ConeDecomposition {
    int n_cones = 64;
    double half_width = 1.5 * kPi / 64;

    static ConeDecomposition standard(int n = 64) { return {n, 1.5 * kPi / n}; }
    /// Disjoint tiling (half-width pi / n).
    static ConeDecomposition partition(int n = 64) { return {n, kPi / n}; }

    double center(int j) const { return 2.0 * kPi * j / n_cones; }
    double step() const { return 2.0 * kPi / n_cones; }

    static double wrap(double a)
    {
        a = std::fmod(a + kPi, 2.0 * kPi);
        if (a < 0) a += 2.0 * kPi;
        return a - kPi;
    }
    bool contains(int j, double angle) const
    {
        double d = wrap(angle - center(j));
        return d >= -half_width && d < half_width;
    }
    /// Share of the lattice cell at (x, xi) inside cone j; the cell's angular extent
    /// (x dxi + xi dx) / r^2 is treated as uniformly covered. Shares over a partition sum to 1.
    double weight(int j, double x, double xi, double dx, double dxi) const
    {
        const double r2 = x * x + xi * xi;
        const double delta = r2 > 0 ? 0.5 * (std::abs(x) * dxi + std::abs(xi) * dx) / r2 : kPi;
        return arc_share(j, std::atan2(xi, x), delta);
    }
    /// Share of the arc [angle - delta, angle + delta) inside cone j.
    double arc_share(int j, double angle, double delta) const
    {
        if (delta >= kPi) return std::min(1.0, half_width / kPi);
        const double d = wrap(angle - center(j));
        double overlap = 0.0;
        for (double shift : {-2.0 * kPi, 0.0, 2.0 * kPi})
            overlap += std::max(0.0, std::min(d + shift + delta, half_width) - std::max(d + shift - delta, -half_width));
        return overlap / (2.0 * delta);
    }
    /// Nearest cone center to an angle.
    int bin(double angle) const
    {
        int j = static_cast<int>(std::lround(angle / step()));
        return ((j % n_cones) + n_cones) % n_cones;
    }
    bool operator==(const ConeDecomposition& o) const
    {
        return n_cones == o.n_cones && std::abs(half_width - o.half_width) < 1e-15;
    }
};

/// sum over lattice cells of <X>^{2s} |F(X)|^2 dx dxi, weighted by the share of the cell in cone j.
inline double cone_energy(const PhaseSpaceField& F, const ConeDecomposition& cones, int j, double s)
{
    if (s < 0) throw DimensionError("order s must be nonnegative");
    double e = 0.0;
    for (int m = 0; m < F.nx; ++m)
        for (int k = 0; k < F.nxi; ++k) {
            const double x = F.x(m), xi = F.xi(k);
            const double c = cones.weight(j, x, xi, F.dx, F.dxi);
            if (c == 0.0) continue;
            const double w = s == 0 ? 1.0 : std::pow(1.0 + x * x + xi * xi, s);
            e += c * w * std::norm(F(m, k));
        }
    return e * F.dx * F.dxi;
}

struct WavefrontOptions {
    std::vector<double> s_grid{0, 1, 2, 3};
    double r0 = 1.0;
    double ratio = std::sqrt(2.0);
    int max_shells = 7;
    int min_shells = 5;
    double margin = 0.25;       // slack on the order threshold
    double energy_floor = 1e-5; // cones whose outer-half shell energy is below this fraction of the field are clean
    double r_max = 0.0;         // outer limit of the shells; 0 means the inscribed radius of the field
    int threads = 0;            // 0 uses the hardware concurrency; results do not depend on it
};

struct DecayProfile {
    std::vector<double> shell_radii;    // J + 1 edges
    std::vector<double> shell_energies; // J values
    double fitted_order = -std::numeric_limits<double>::infinity();
    double tail_fraction = 0.0; // outer half of the shells, relative to the whole field
    bool active = false;
};

/// Shells stop at half the source band: above xi_max / 2 the Wigner distribution of a band-limited
/// signal loses the oscillations that carry the decay of discontinuous data.
inline WavefrontOptions half_band(const Grid& source, WavefrontOptions opt = {})
{
    if (opt.r_max == 0.0) opt.r_max = 0.5 * source.xi_max();
    return opt;
}

/// theta(s) = 2s + 2.
inline double order_threshold(double s) { return -(2.0 * s + 2.0); }

struct WaveFrontReport {
    ConeDecomposition cones;
    WavefrontOptions options;
    std::vector<DecayProfile> profiles;
    DecayProfile global;
    double total_energy = 0.0;

    bool singular(int j, double s) const
    {
        const DecayProfile& p = profiles[static_cast<size_t>(j)];
        return p.active && p.fitted_order > order_threshold(s) + options.margin;
    }
    std::vector<int> singular_set(double s) const
    {
        std::vector<int> out;
        for (int j = 0; j < cones.n_cones; ++j)
            if (singular(j, s)) out.push_back(j);
        return out;
    }
    bool empty_at(double s) const { return singular_set(s).empty(); }

    /// Largest fitted order over cones with energy above the floor.
    double global_order() const
    {
        double g = -std::numeric_limits<double>::infinity();
        for (const auto& p : profiles)
            if (p.active) g = std::max(g, p.fitted_order);
        return g;
    }
    bool global_passes(double s) const { return global_order() <= order_threshold(s) + options.margin; }

    /// One row per cone after a `#` metadata line carrying the decomposition and margin.
    std::string csv() const
    {
        std::ostringstream o;
        o << "# cones=" << cones.n_cones << " half_width=" << format_double(cones.half_width)
          << " margin=" << format_double(options.margin) << " shells=";
        for (size_t i = 0; i < global.shell_radii.size(); ++i) o << (i ? ":" : "") << format_double(global.shell_radii[i]);
        o << '\n';
        o << "cone,angle,fitted_order,tail_fraction,active";
        for (double s : options.s_grid) o << ",singular_s" << format_double(s);
        for (size_t i = 0; i + 1 < global.shell_radii.size(); ++i) o << ",E" << i;
        o << '\n';
        for (int j = 0; j < cones.n_cones; ++j) {
            const auto& p = profiles[static_cast<size_t>(j)];
            o << j << ',' << format_double(cones.center(j)) << ',' << format_double(p.fitted_order) << ','
              << format_double(p.tail_fraction) << ',' << (p.active ? 1 : 0);
            for (double s : options.s_grid) o << ',' << (singular(j, s) ? 1 : 0);
            for (double e : p.shell_energies) o << ',' << format_double(e);
            o << '\n';
        }
        return o.str();
    }

    /// Polar sketch: each flagged cone at the highest tested order marks its direction.
    std::string ascii_polar(int radius = 10) const
    {
        const int w = 2 * radius + 1;
        std::vector<std::string> rows(static_cast<size_t>(w), std::string(static_cast<size_t>(2 * w), ' '));
        auto put = [&](double ang, double r, char c) {
            int col = static_cast<int>(std::lround(radius + r * std::cos(ang)));
            int row = static_cast<int>(std::lround(radius - r * std::sin(ang)));
            if (row >= 0 && row < w && col >= 0 && col < w) rows[row][2 * col] = c;
        };
        for (int j = 0; j < cones.n_cones; ++j) put(cones.center(j), radius, '.');
        for (int j = 0; j < cones.n_cones; ++j) {
            int level = -1;
            for (double s : options.s_grid)
                if (singular(j, s) && (level < 0 || s < level)) level = static_cast<int>(s);
            if (level >= 0)
                for (int r = 2; r <= radius; ++r) put(cones.center(j), r, static_cast<char>('0' + std::min(level, 9)));
        }
        put(0.0, 0.0, '+');
        std::string out = "xi ^  (digit = lowest order s at which the cone is flagged)\n";
        for (const auto& r : rows) out += r + '\n';
        out += std::string(static_cast<size_t>(2 * w), ' ') + "> x\n";
        return out;
    }
};

namespace detail {

inline double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly)
{
    const size_t n = lx.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

/// Density exponent from shell energies: E_j ~ r^p means |F|^2 ~ r^{p - 2}.
inline void finish_profile(DecayProfile& p, double total, const WavefrontOptions& opt)
{
    std::vector<double> lx, ly;
    double tail = 0.0;
    const size_t half = p.shell_energies.size() / 2;
    for (size_t i = 0; i < p.shell_energies.size(); ++i) {
        if (i >= half) tail += p.shell_energies[i];
        if (p.shell_energies[i] > 1e-300) {
            lx.push_back(std::log(p.shell_radii[i] * std::sqrt(opt.ratio)));
            ly.push_back(std::log(p.shell_energies[i]));
        }
    }
    p.tail_fraction = total > 0 ? tail / total : 0.0;
    if (lx.size() >= 2) p.fitted_order = fit_slope(lx, ly) - 2.0;
    p.active = p.tail_fraction > opt.energy_floor && lx.size() >= 2;
}

} // namespace detail

inline WaveFrontReport wavefront_report(const PhaseSpaceField& F, const ConeDecomposition& cones = ConeDecomposition::standard(),
                                        const WavefrontOptions& opt = {})
{
    double inscribed = std::min(F.nx / 2 * F.dx, F.nxi / 2 * F.dxi);
    if (opt.r_max > 0) inscribed = std::min(inscribed, opt.r_max);
    std::vector<double> radii{opt.r0};
    while (static_cast<int>(radii.size()) <= opt.max_shells && radii.back() * opt.ratio <= inscribed * (1 + 1e-12))
        radii.push_back(radii.back() * opt.ratio);
    const int J = static_cast<int>(radii.size()) - 1;
    if (J < opt.min_shells)
        throw TooFewShells("field radius " + format_double(inscribed) + " gives " + std::to_string(J) +
                           " shells, need " + std::to_string(opt.min_shells));
    WaveFrontReport R;
    R.cones = cones;
    R.options = opt;
    R.profiles.assign(static_cast<size_t>(cones.n_cones), DecayProfile{radii, std::vector<double>(J, 0.0)});
    R.global = DecayProfile{radii, std::vector<double>(J, 0.0)};
    const double cell = F.dx * F.dxi;
    const double lr0 = std::log(opt.r0), lrat = std::log(opt.ratio);
    const int nc = cones.n_cones;

    // rows are split into a fixed number of chunks summed in order, so the result is the same for any thread count
    struct Partial {
        std::vector<double> cone, global;
        double total = 0.0;
    };
    const int n_chunks = std::min(F.nx, 64);
    std::vector<Partial> parts(static_cast<size_t>(n_chunks));
    auto work = [&](int c) {
        Partial& P = parts[static_cast<size_t>(c)];
        P.cone.assign(static_cast<size_t>(nc * J), 0.0);
        P.global.assign(static_cast<size_t>(J), 0.0);
        for (int m = c * F.nx / n_chunks; m < (c + 1) * F.nx / n_chunks; ++m)
            for (int k = 0; k < F.nxi; ++k) {
                const double x = F.x(m), xi = F.xi(k);
                const double e = std::norm(F(m, k)) * cell;
                P.total += e;
                const double r = std::hypot(x, xi);
                if (r < radii.front() || r >= radii.back()) continue;
                int sh = static_cast<int>(std::floor((std::log(r) - lr0) / lrat + 1e-12));
                sh = std::clamp(sh, 0, J - 1);
                if (r < radii[sh]) --sh;
                else if (r >= radii[sh + 1]) ++sh;
                if (sh < 0 || sh >= J) continue;
                P.global[sh] += e;
                const double ang = std::atan2(xi, x);
                const int j0 = cones.bin(ang);
                const double delta = 0.5 * (std::abs(x) * F.dxi + std::abs(xi) * F.dx) / (r * r);
                const int reach = static_cast<int>(std::ceil((cones.half_width + delta) / cones.step())) + 1;
                const bool all = 2 * reach + 1 >= nc;
                for (int d = all ? 0 : -reach; d <= (all ? nc - 1 : reach); ++d) {
                    int j = ((j0 + d) % nc + nc) % nc;
                    const double w = cones.arc_share(j, ang, delta);
                    if (w > 0.0) P.cone[static_cast<size_t>(j * J + sh)] += w * e;
                }
            }
    };
    int nt = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::clamp(nt, 1, n_chunks);
    if (nt == 1) {
        for (int c = 0; c < n_chunks; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int c = t; c < n_chunks; c += nt) work(c);
            });
        for (auto& th : pool) th.join();
    }
    for (const Partial& P : parts) {
        R.total_energy += P.total;
        for (int i = 0; i < J; ++i) R.global.shell_energies[i] += P.global[i];
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < J; ++i) R.profiles[j].shell_energies[i] += P.cone[static_cast<size_t>(j * J + i)];
    }
    for (auto& p : R.profiles) detail::finish_profile(p, R.total_energy, opt);
    detail::finish_profile(R.global, R.total_energy, opt);
    return R;
}

/// Reads what csv() wrote; flags are recomputed from the stored orders and agree with the written ones.
inline WaveFrontReport read_report_csv(std::istream& in)
{
    std::string meta;
    if (!std::getline(in, meta) || meta.rfind("# cones=", 0) != 0) throw ParseError("report file lacks its metadata line");
    WaveFrontReport R;
    {
        std::istringstream m(meta.substr(2));
        std::string item;
        while (m >> item) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParseError("bad report metadata: " + item);
            const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "cones") R.cones.n_cones = parse_int(value);
            else if (key == "half_width") R.cones.half_width = parse_double(value);
            else if (key == "margin") R.options.margin = parse_double(value);
            else if (key == "shells") {
                std::istringstream edges(value);
                std::string e;
                while (std::getline(edges, e, ':')) R.global.shell_radii.push_back(parse_double(e));
            }
        }
    }
    auto rows = read_csv_cells(in);
    if (rows.empty()) throw ParseError("empty report file");
    const auto& head = rows.front();
    if (head.size() < 5 || head[0] != "cone" || head[4] != "active") throw ParseError("unexpected report header");
    R.options.s_grid.clear();
    size_t col = 5;
    for (; col < head.size() && head[col].rfind("singular_s", 0) == 0; ++col)
        R.options.s_grid.push_back(parse_double(head[col].substr(10)));
    const size_t first_e = col;
    if (!R.global.shell_radii.empty() && head.size() - first_e + 1 != R.global.shell_radii.size())
        throw ParseError("report shell columns do not match its shell edges");
    if (static_cast<int>(rows.size()) - 1 != R.cones.n_cones) throw ParseError("report row count does not match its cones");
    R.profiles.resize(static_cast<size_t>(R.cones.n_cones));
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& c = rows[r];
        if (c.size() != head.size()) throw ParseError("ragged report row " + std::to_string(r));
        const int j = parse_int(c[0]);
        if (j < 0 || j >= R.cones.n_cones) throw ParseError("cone index out of range");
        DecayProfile& p = R.profiles[static_cast<size_t>(j)];
        p.fitted_order = std::strtod(c[2].c_str(), nullptr);
        p.tail_fraction = parse_double(c[3]);
        p.active = c[4] == "1";
        for (size_t e = first_e; e < c.size(); ++e) p.shell_energies.push_back(parse_double(c[e]));
        p.shell_radii = R.global.shell_radii;
    }
    return R;
}

inline WaveFrontReport read_report_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report " + path);
    return read_report_csv(in);
}

inline WaveFrontReport cross_wavefront_report(const Signal& f, const Signal& g, const TfrMap& kind,
                                              const ConeDecomposition& cones = ConeDecomposition::standard(),
                                              const WavefrontOptions& opt = {})
{
    return wavefront_report(kind.forward(outer(f, g)), cones, opt);
}

struct InclusionResult {
    bool holds = true;
    std::vector<std::pair<double, int>> violations; // (s, cone of R1)
};

/// Every cone flagged in R1 must lie within one cone of the image, under map, of a cone flagged in R2.
inline InclusionResult inclusion_check(const WaveFrontReport& R1, const WaveFrontReport& R2,
                                       const MatD& map = MatD::Identity(2, 2), int slack = 1)
{
    if (!(R1.cones == R2.cones)) throw DimensionError("reports use different cone decompositions");
    const ConeDecomposition& C = R1.cones;
    const int n = C.n_cones;
    auto image_angle = [&](double a) { return std::atan2(map(1, 0) * std::cos(a) + map(1, 1) * std::sin(a),
                                                         map(0, 0) * std::cos(a) + map(0, 1) * std::sin(a)); };
    InclusionResult res;
    for (double s : R1.options.s_grid) {
        std::vector<char> allowed(static_cast<size_t>(n), 0);
        for (int j : R2.singular_set(s)) {
            // image of the arc, sampled densely, widened by the slack
            const int samples = 16;
            for (int t = 0; t <= samples; ++t) {
                double a = C.center(j) - C.half_width + 2.0 * C.half_width * t / samples;
                int b = C.bin(image_angle(a));
                for (int d = -slack; d <= slack; ++d) allowed[((b + d) % n + n) % n] = 1;
            }
        }
        for (int j : R1.singular_set(s))
            if (!allowed[j]) {
                res.holds = false;
                res.violations.emplace_back(s, j);
            }
    }
    return res;
}

/// Cones flagged in any of the given reports.
inline InclusionResult union_inclusion_check(const WaveFrontReport& R, const std::vector<const WaveFrontReport*>& parts,
                                             int slack = 1)
{
    InclusionResult res;
    const int n = R.cones.n_cones;
    for (double s : R.options.s_grid) {
        std::vector<char> allowed(static_cast<size_t>(n), 0);
        for (const auto* p : parts) {
            if (!(p->cones == R.cones)) throw DimensionError("reports use different cone decompositions");
            for (int j : p->singular_set(s))
                for (int d = -slack; d <= slack; ++d) allowed[((j + d) % n + n) % n] = 1;
        }
        for (int j : R.singular_set(s))
            if (!allowed[j]) {
                res.holds = false;
                res.violations.emplace_back(s, j);
            }
    }
    return res;
}

struct GhostAnalysis {
    PhaseSpaceField ghost; // 2 Re W(f, g)
    WaveFrontReport report_f, report_g, report_sum, report_cross;
    InclusionResult inclusion;
};

/// WF(f + g) against WF(f) u WF(g) u WF(f, g). The ghost field lives on the grid of f; the reports
/// use the oversampled embedding unless oversample is false.
inline GhostAnalysis ghost_analysis(const Signal& f, const Signal& g,
                                    const ConeDecomposition& cones = ConeDecomposition::standard(),
                                    const WavefrontOptions& opt = {}, bool oversample = true)
{
    f.check_same(g);
    GhostAnalysis out;
    out.ghost = cross_wigner(f, g);
    out.ghost.values = (2.0 * out.ghost.values.real()).cast<cd>();
    const Signal u = oversample ? oversample2(f) : f, v = oversample ? oversample2(g) : g;
    const WavefrontOptions o = oversample ? half_band(f.grid, opt) : opt;
    out.report_f = wavefront_report(wigner(u), cones, o);
    out.report_g = wavefront_report(wigner(v), cones, o);
    out.report_sum = wavefront_report(wigner(u + v), cones, o);
    out.report_cross = wavefront_report(cross_wigner(u, v), cones, o);
    out.inclusion = union_inclusion_check(out.report_sum, {&out.report_f, &out.report_g, &out.report_cross});
    return out;
}

// ---- microlocality ----

struct MicrolocalResult {
    WaveFrontReport report_in, report_out;
    InclusionResult verdict;
};

/// WF(Op(a) f) against WF(f); with oversample the signal is first embedded by oversample2 and the
/// shells stop at half the source band.
inline MicrolocalResult microlocality_check(const SymbolFn& a, const Signal& f, const WavefrontOptions& opt = {},
                                            const ConeDecomposition& cones = ConeDecomposition::standard(),
                                            bool oversample = true)
{
    const Signal u = oversample ? oversample2(f) : f;
    const WavefrontOptions o = oversample ? half_band(f.grid, opt) : opt;
    MicrolocalResult r{wavefront_report(wigner(u), cones, o), wavefront_report(wigner(weyl_apply(a, u)), cones, o), {}};
    r.verdict = inclusion_check(r.report_out, r.report_in);
    return r;
}

/// WF(K f) against S WF(f) for the quadratic FIO of S with amplitude a.
inline MicrolocalResult fio_microlocality_check(const SympMat<double>& S, const SymbolFn& a, const Signal& f,
                                                const WavefrontOptions& opt = {},
                                                const ConeDecomposition& cones = ConeDecomposition::standard(),
                                                bool oversample = true)
{
    const Signal u = oversample ? oversample2(f) : f;
    const WavefrontOptions o = oversample ? half_band(f.grid, opt) : opt;
    MicrolocalResult r{wavefront_report(wigner(u), cones, o), wavefront_report(wigner(fio_apply(S, a, u)), cones, o), {}};
    r.verdict = inclusion_check(r.report_out, r.report_in, S.matrix());
    return r;
}

} // namespace pswb
