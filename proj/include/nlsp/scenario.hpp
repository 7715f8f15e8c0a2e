#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/observables.hpp"
#include "nlsp/potential.hpp"
#include "nlsp/solver.hpp"
#include "nlsp/transforms.hpp"

namespace nlsp {

// ---------------------------------------------------------------------------
// Declarative experiment description, parsed from sectioned key=value text.

struct GridSpecSection {
    std::size_t dim = 1;
    std::vector<std::size_t> points;  // empty: dimension-dependent default
    double half_width = 16.0;
};

struct PotentialSection {
    // Canonical route: per-axis delta/omega plus optional linear/constant.
    std::vector<int> delta;
    std::vector<double> omega;
    std::vector<double> linear;
    double constant = 0.0;
    // Matrix route: row-major symmetric quadratic coefficient matrix.
    std::vector<double> matrix;
    bool use_matrix = false;
};

struct NonlinearitySection {
    double lambda = 0.0;
    double sigma = 1.0;
    double lambda_eps_exponent = 0.0;  // effective coupling lambda * eps^k
};

enum class DatumKind { gaussian, ground_state_proxy, concentrating };

struct InitialSection {
    DatumKind kind = DatumKind::gaussian;
    double amplitude = 1.0;
    double width = 1.0;
    double chirp = 0.0;                // multiplies exp(i b |x|^2 / (2 eps))
    std::vector<double> center;
    std::vector<double> plane;         // xi0 in exp(i xi0 . x / eps)
};

struct TimeSection {
    double t_end = 1.0;
    double record_interval = 0.0;
    double dt_initial = 1e-3;
    double dt_min = 1e-7;
    std::vector<double> state_times;
};

struct ObservablesSection {
    std::vector<double> lp;
    double scattering_tol = 1e-4;
};

enum class OracleMode { off, automatic, harmonic_lens, repulsive_lens, avron_herbst };

struct OutputSection {
    std::string prefix = "scenario";
    OracleMode oracle = OracleMode::off;
};

struct ScenarioSpec {
    std::string name = "unnamed";
    double epsilon = 1.0;
    GridSpecSection grid;
    PotentialSection potential;
    NonlinearitySection nonlinearity;
    InitialSection initial;
    TimeSection time;
    ObservablesSection observables;
    OutputSection output;
};

namespace detail {

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
    throw config_error("line " + std::to_string(line) + ": " + what);
}

inline double parse_num(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        parse_fail(line, "malformed number '" + s + "'");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) parse_fail(line, "malformed number '" + s + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& s, std::size_t line) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) out.push_back(parse_num(item, line));
    if (out.empty()) parse_fail(line, "empty list");
    return out;
}

inline std::size_t parse_size(const std::string& s, std::size_t line) {
    const double v = parse_num(s, line);
    if (v < 1.0 || v != std::floor(v)) parse_fail(line, "positive integer required");
    return static_cast<std::size_t>(v);
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

inline ScenarioSpec parse_scenario(const std::string& text) {
    ScenarioSpec spec;
    std::set<std::string> seen;  // "section/key" for duplicate detection
    std::string section;
    std::stringstream ss(text);
    std::string raw;
    std::size_t line = 0;

    const std::set<std::string> known_sections = {"grid",        "potential", "nonlinearity",
                                                  "initial",     "time",      "observables",
                                                  "output"};

    while (std::getline(ss, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string s = detail::trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') detail::parse_fail(line, "unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (!known_sections.count(section))
                detail::parse_fail(line, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) detail::parse_fail(line, "expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty()) detail::parse_fail(line, "empty key");
        if (val.empty()) detail::parse_fail(line, "empty value for '" + key + "'");
        if (!seen.insert(section + "/" + key).second)
            detail::parse_fail(line, "duplicate key '" + key + "'");

        if (section.empty()) {
            if (key == "name") spec.name = val;
            else if (key == "epsilon") spec.epsilon = detail::parse_num(val, line);
            else detail::parse_fail(line, "unknown top-level key '" + key + "'");
        } else if (section == "grid") {
            if (key == "dim") spec.grid.dim = detail::parse_size(val, line);
            else if (key == "points") {
                spec.grid.points.clear();
                for (double v : detail::parse_list(val, line)) {
                    if (v < 8.0 || v != std::floor(v))
                        detail::parse_fail(line, "points must be integers >= 8");
                    spec.grid.points.push_back(static_cast<std::size_t>(v));
                }
            } else if (key == "half_width")
                spec.grid.half_width = detail::parse_num(val, line);
            else detail::parse_fail(line, "unknown grid key '" + key + "'");
        } else if (section == "potential") {
            if (key == "delta") {
                spec.potential.delta.clear();
                for (double v : detail::parse_list(val, line)) {
                    if (v != -1.0 && v != 0.0 && v != 1.0)
                        detail::parse_fail(line, "delta entries must be -1, 0, or 1");
                    spec.potential.delta.push_back(static_cast<int>(v));
                }
            } else if (key == "omega")
                spec.potential.omega = detail::parse_list(val, line);
            else if (key == "linear")
                spec.potential.linear = detail::parse_list(val, line);
            else if (key == "constant")
                spec.potential.constant = detail::parse_num(val, line);
            else if (key == "matrix") {
                spec.potential.matrix = detail::parse_list(val, line);
                spec.potential.use_matrix = true;
            } else detail::parse_fail(line, "unknown potential key '" + key + "'");
        } else if (section == "nonlinearity") {
            if (key == "lambda") spec.nonlinearity.lambda = detail::parse_num(val, line);
            else if (key == "sigma") spec.nonlinearity.sigma = detail::parse_num(val, line);
            else if (key == "lambda_eps_exponent")
                spec.nonlinearity.lambda_eps_exponent = detail::parse_num(val, line);
            else detail::parse_fail(line, "unknown nonlinearity key '" + key + "'");
        } else if (section == "initial") {
            if (key == "kind") {
                if (val == "gaussian") spec.initial.kind = DatumKind::gaussian;
                else if (val == "ground_state_proxy")
                    spec.initial.kind = DatumKind::ground_state_proxy;
                else if (val == "concentrating") spec.initial.kind = DatumKind::concentrating;
                else detail::parse_fail(line, "unknown datum kind '" + val + "'");
            } else if (key == "amplitude")
                spec.initial.amplitude = detail::parse_num(val, line);
            else if (key == "width") spec.initial.width = detail::parse_num(val, line);
            else if (key == "chirp") spec.initial.chirp = detail::parse_num(val, line);
            else if (key == "center") spec.initial.center = detail::parse_list(val, line);
            else if (key == "plane") spec.initial.plane = detail::parse_list(val, line);
            else detail::parse_fail(line, "unknown initial key '" + key + "'");
        } else if (section == "time") {
            if (key == "t_end") spec.time.t_end = detail::parse_num(val, line);
            else if (key == "record_interval")
                spec.time.record_interval = detail::parse_num(val, line);
            else if (key == "dt_initial") spec.time.dt_initial = detail::parse_num(val, line);
            else if (key == "dt_min") spec.time.dt_min = detail::parse_num(val, line);
            else if (key == "state_times")
                spec.time.state_times = detail::parse_list(val, line);
            else detail::parse_fail(line, "unknown time key '" + key + "'");
        } else if (section == "observables") {
            if (key == "lp") spec.observables.lp = detail::parse_list(val, line);
            else if (key == "scattering_tol")
                spec.observables.scattering_tol = detail::parse_num(val, line);
            else detail::parse_fail(line, "unknown observables key '" + key + "'");
        } else if (section == "output") {
            if (key == "prefix") spec.output.prefix = val;
            else if (key == "oracle") {
                if (val == "off") spec.output.oracle = OracleMode::off;
                else if (val == "auto") spec.output.oracle = OracleMode::automatic;
                else if (val == "harmonic_lens") spec.output.oracle = OracleMode::harmonic_lens;
                else if (val == "repulsive_lens") spec.output.oracle = OracleMode::repulsive_lens;
                else if (val == "avron_herbst") spec.output.oracle = OracleMode::avron_herbst;
                else detail::parse_fail(line, "unknown oracle mode '" + val + "'");
            } else detail::parse_fail(line, "unknown output key '" + key + "'");
        }
    }

    if (!(spec.epsilon > 0.0)) throw config_error("epsilon must be positive");
    if (spec.grid.dim < 1 || spec.grid.dim > 3) throw config_error("grid dim must be 1..3");
    if (!(spec.grid.half_width > 0.0)) throw config_error("half_width must be positive");
    if (!(spec.initial.width > 0.0)) throw config_error("initial width must be positive");
    // Constructing the nonlinearity validates the admissible exponent range.
    (void)Nonlinearity(spec.nonlinearity.lambda, spec.nonlinearity.sigma, spec.grid.dim);
    return spec;
}

inline ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Builders from the parsed sections.

inline Grid build_grid(const ScenarioSpec& spec) {
    std::vector<std::size_t> pts = spec.grid.points;
    if (pts.empty()) {
        const std::size_t def = spec.grid.dim == 1 ? 2048 : (spec.grid.dim == 2 ? 256 : 64);
        pts.assign(spec.grid.dim, def);
    } else if (pts.size() == 1) {
        pts.assign(spec.grid.dim, pts[0]);
    }
    if (pts.size() != spec.grid.dim) throw config_error("points list does not match dim");
    return Grid(pts, std::vector<double>(spec.grid.dim, spec.grid.half_width));
}

inline QuadraticPotential build_potential(const ScenarioSpec& spec) {
    const std::size_t n = spec.grid.dim;
    const PotentialSection& p = spec.potential;
    if (p.use_matrix) {
        if (p.matrix.size() != n * n) throw config_error("matrix must have dim*dim entries");
        std::vector<double> b = p.linear;
        if (b.empty()) b.assign(n, 0.0);
        if (b.size() != n) throw config_error("linear must have dim entries");
        std::vector<std::vector<double>> a(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i][j] = p.matrix[i * n + j];
        CanonicalForm cf = canonicalize(a, b, p.constant);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double want = i == j ? 1.0 : 0.0;
                if (std::abs(std::abs(cf.basis[i][j]) - want) > 1e-12)
                    throw config_error(
                        "matrix potential is not axis-aligned; rotate coordinates first");
            }
        for (double s : cf.shift)
            if (std::abs(s) > 1e-12)
                throw config_error("matrix potential needs a coordinate shift; recenter first");
        return cf.potential;
    }
    std::vector<int> delta = p.delta;
    if (delta.empty()) delta.assign(n, 0);
    if (delta.size() == 1) delta.assign(n, delta[0]);
    if (delta.size() != n) throw config_error("delta list does not match dim");
    std::vector<double> omega = p.omega;
    if (omega.empty()) omega.assign(n, 0.0);
    if (omega.size() == 1) omega.assign(n, omega[0]);
    if (omega.size() != n) throw config_error("omega list does not match dim");
    for (std::size_t a = 0; a < n; ++a)
        if (delta[a] == 0) omega[a] = 0.0;
    std::vector<double> lin = p.linear;
    if (lin.empty()) lin.assign(n, 0.0);
    if (lin.size() != n) throw config_error("linear list does not match dim");
    return QuadraticPotential(delta, omega, lin, p.constant);
}

inline Nonlinearity build_nonlinearity(const ScenarioSpec& spec) {
    const double lam = spec.nonlinearity.lambda *
                       std::pow(spec.epsilon, spec.nonlinearity.lambda_eps_exponent);
    return Nonlinearity(lam, spec.nonlinearity.sigma, spec.grid.dim);
}

inline WaveFunction build_initial(const ScenarioSpec& spec, const Grid& grid) {
    const std::size_t n = grid.dim();
    const double eps = spec.epsilon;
    const InitialSection& ini = spec.initial;
    std::vector<double> center = ini.center, plane = ini.plane;
    if (center.empty()) center.assign(n, 0.0);
    if (plane.empty()) plane.assign(n, 0.0);
    if (center.size() != n || plane.size() != n)
        throw config_error("center/plane lists must have dim entries");

    if (ini.kind == DatumKind::ground_state_proxy) {
        Nonlinearity nl = build_nonlinearity(spec);
        WaveFunction w = ground_state_proxy(grid, nl);
        w.epsilon = eps;
        for (cdouble& z : w.values) z *= ini.amplitude;
        return w;
    }

    const bool conc = ini.kind == DatumKind::concentrating;
    if (conc) {
        for (std::size_t a = 0; a < n; ++a)
            if (grid.axis(a).spacing > eps * ini.width / 8.0)
                throw resolution_error(
                    "concentrating datum: fewer than 8 cells per eps-scale feature");
    }
    WaveFunction w = WaveFunction::zeros(grid);
    w.epsilon = eps;
    const double amp = conc ? ini.amplitude * std::pow(eps, -0.5 * static_cast<double>(n))
                            : ini.amplitude;
    const double inv2w2 = 1.0 / (2.0 * ini.width * ini.width);
    detail::for_each_index(grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double q = 0.0, x2 = 0.0, px = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            double xa = grid.coords(a)[idx[a]];
            if (conc) xa /= eps;
            q += (xa - center[a]) * (xa - center[a]);
            x2 += xa * xa;
            px += plane[a] * xa;
        }
        // Chirp and plane phases ride at scale 1/eps in the macroscopic frame
        // and at scale 1 in the concentrating profile variable.
        const double arg = conc ? 0.5 * ini.chirp * x2 + px
                                : (0.5 * ini.chirp * x2 + px) / eps;
        w.values[flat] = amp * std::exp(-q * inv2w2) * cdouble{std::cos(arg), std::sin(arg)};
    });
    return w;
}

// ---------------------------------------------------------------------------
// Experiment execution and CSV emission.

struct OracleRow {
    double t = 0.0;
    double rel_l2_diff = 0.0;
};

struct Verdict {
    std::string label;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    ScenarioSpec spec;
    bool ran = false;
    RunOutcome outcome{WaveFunction(Grid({8}, {1.0}), std::vector<cdouble>(8))};
    BlowupCriteriaReport criteria;
    std::vector<OracleRow> oracle;
    double oracle_max_rel_diff = 0.0;
    std::vector<Verdict> verdicts;
    std::string error;
    std::string csv_path;
    std::string verdict_path;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const std::vector<ObservableRecord>& recs,
                      const std::vector<double>& lp) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write '" + path + "'");
    out << "t,mass,energy,kinetic,potential_term,nonlinear_term,J_norm_sq,H_norm_sq,virial,E1,E2";
    for (double p : lp) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "L%g", p);
        out << ',' << buf;
    }
    out << ",Linf,boundary_mass,spectral_tail\n";
    for (const ObservableRecord& r : recs) {
        out << fmt17(r.t) << ',' << fmt17(r.mass) << ',' << fmt17(r.energy) << ','
            << fmt17(r.kinetic) << ',' << fmt17(r.potential_term) << ','
            << fmt17(r.nonlinear_term) << ',' << fmt17(r.j_norm_sq) << ','
            << fmt17(r.h_norm_sq) << ',' << fmt17(r.virial) << ',' << fmt17(r.e1) << ','
            << fmt17(r.e2);
        for (double v : r.lp) out << ',' << fmt17(v);
        out << ',' << fmt17(r.linf) << ',' << fmt17(r.boundary_mass) << ','
            << fmt17(r.spectral_tail) << '\n';
    }
}

inline std::vector<double> record_times(const TimeSection& t) {
    std::vector<double> out;
    if (t.record_interval > 0.0) {
        const double dir = t.t_end >= 0.0 ? 1.0 : -1.0;
        const double step = dir * t.record_interval;
        for (double tk = step; dir * tk < dir * t.t_end - 1e-12 * std::abs(t.t_end);
             tk += step)
            out.push_back(tk);
    }
    out.push_back(t.t_end);
    return out;
}

}  // namespace detail

// Free-solution comparison along the exact transform, at the stored state times.
inline std::vector<OracleRow> run_oracle_comparison(const ScenarioSpec& spec,
                                                    const QuadraticPotential& pot,
                                                    const Nonlinearity& nl,
                                                    const WaveFunction& u0,
                                                    const RunOutcome& direct) {
    OracleMode mode = spec.output.oracle;
    if (mode == OracleMode::automatic) {
        if (pot.is_isotropic() && pot.delta[0] == 1 && !pot.has_gauge_terms())
            mode = OracleMode::harmonic_lens;
        else if (pot.is_isotropic() && pot.delta[0] == -1 && !pot.has_gauge_terms())
            mode = OracleMode::repulsive_lens;
        else if (pot.is_uniform(0) && pot.constant == 0.0)
            mode = OracleMode::avron_herbst;
        else
            throw config_error("no transform oracle applies to this potential");
    }
    const QuadraticPotential free_pot = QuadraticPotential::free_space(pot.dim());
    SolverConfig cfg;
    cfg.dt_initial = spec.time.dt_initial;
    cfg.dt_min = spec.time.dt_min;

    std::vector<double> direct_times;
    for (const WaveFunction& s : direct.states) direct_times.push_back(s.time);

    std::vector<double> warped(direct_times.size());
    const double omega = pot.omega.empty() ? 0.0 : pot.omega[0];
    for (std::size_t k = 0; k < direct_times.size(); ++k) {
        switch (mode) {
            case OracleMode::harmonic_lens: warped[k] = harmonic_warp(direct_times[k], omega); break;
            case OracleMode::repulsive_lens: warped[k] = repulsive_warp(direct_times[k], omega); break;
            default: warped[k] = direct_times[k]; break;
        }
    }
    if (warped.empty()) return {};

    MonitorSpec mon;
    mon.state_times = warped;
    const double s_end = warped.back();
    RunOutcome free_run = evolve(u0, s_end, free_pot, nl, cfg, mon);
    if (free_run.status != RunStatus::completed)
        throw resolution_error("oracle free solve did not complete");
    if (free_run.states.size() != warped.size())
        throw resolution_error("oracle free solve missed checkpoints");

    // Each comparison runs in the frame whose resampling dilation contracts:
    // trap states are unwarped into the free frame (cos-scaled sampling stays
    // interior up to the focus), free states are warped into the inverted-trap
    // frame (1/cosh-scaled sampling).  Both directions are mass isometries, so
    // the relative difference is frame independent.
    std::vector<OracleRow> rows;
    for (std::size_t k = 0; k < warped.size(); ++k) {
        WaveFunction v = free_run.states[k];
        const WaveFunction& ud = direct.states[k];
        WaveFunction mapped = [&] {
            switch (mode) {
                case OracleMode::harmonic_lens:
                    return harmonic_lens_inverse(ud, omega, nl);
                case OracleMode::repulsive_lens:
                    return repulsive_lens(v, direct_times[k], omega, nl);
                default: {
                    v.time = direct_times[k];
                    return avron_herbst(v, pot.residual_linear);
                }
            }
        }();
        const WaveFunction& ref = mode == OracleMode::harmonic_lens ? free_run.states[k] : ud;
        double diff2 = 0.0, ref2 = 0.0;
        for (std::size_t i = 0; i < ref.values.size(); ++i) {
            diff2 += std::norm(ref.values[i] - mapped.values[i]);
            ref2 += std::norm(ref.values[i]);
        }
        rows.push_back({direct_times[k], std::sqrt(diff2 / std::max(ref2, 1e-300))});
    }
    return rows;
}

inline ExperimentReport run_scenario(const ScenarioSpec& spec, const std::string& out_dir = "") {
    ExperimentReport rep;
    rep.spec = spec;
    const Grid grid = build_grid(spec);
    const QuadraticPotential pot = build_potential(spec);
    const Nonlinearity nl = build_nonlinearity(spec);
    const WaveFunction u0 = build_initial(spec, grid);
    rep.criteria = blowup_criteria_report(u0, pot, nl);

    SolverConfig cfg;
    cfg.dt_initial = spec.time.dt_initial;
    cfg.dt_min = spec.time.dt_min;
    MonitorSpec mon;
    mon.record_interval = spec.time.record_interval;
    mon.lp_exponents = spec.observables.lp;
    mon.state_times = spec.time.state_times;
    if (spec.output.oracle != OracleMode::off && mon.state_times.empty())
        mon.state_times = detail::record_times(spec.time);

    rep.outcome = evolve(u0, spec.time.t_end, pot, nl, cfg, mon);
    rep.ran = true;

    if (spec.output.oracle != OracleMode::off) {
        rep.oracle = run_oracle_comparison(spec, pot, nl, u0, rep.outcome);
        for (const OracleRow& r : rep.oracle)
            rep.oracle_max_rel_diff = std::max(rep.oracle_max_rel_diff, r.rel_l2_diff);
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        rep.csv_path = out_dir + "/" + spec.output.prefix + ".csv";
        rep.verdict_path = out_dir + "/" + spec.output.prefix + ".verdicts";
        detail::write_csv(rep.csv_path, rep.outcome.records, spec.observables.lp);
        std::ofstream vf(rep.verdict_path);
        vf << "name = " << spec.name << '\n';
        vf << "status = " << to_string(rep.outcome.status) << '\n';
        vf << "t_final = " << detail::fmt17(rep.outcome.t_final) << '\n';
        if (rep.outcome.status == RunStatus::blow_up_detected) {
            vf << "bracket_lo = " << detail::fmt17(rep.outcome.bracket_lo) << '\n';
            vf << "bracket_hi = " << detail::fmt17(rep.outcome.bracket_hi) << '\n';
        }
        vf << "records = " << rep.outcome.records.size() << '\n';
        vf << "criteria_preconditions = " << (rep.criteria.preconditions_hold ? 1 : 0) << '\n';
        vf << "criteria_free_energy = " << detail::fmt17(rep.criteria.free_energy) << '\n';
        vf << "criteria_free_blowup = " << (rep.criteria.free_blowup ? 1 : 0) << '\n';
        vf << "criteria_harmonic_trap_blowup = " << (rep.criteria.harmonic_trap_blowup ? 1 : 0)
           << '\n';
        vf << "criteria_harmonic_time_bound = "
           << detail::fmt17(rep.criteria.harmonic_time_bound) << '\n';
        vf << "criteria_repulsive_one_sided = " << (rep.criteria.repulsive_one_sided ? 1 : 0)
           << '\n';
        vf << "criteria_repulsive_two_sided = " << (rep.criteria.repulsive_two_sided ? 1 : 0)
           << '\n';
        if (spec.output.oracle != OracleMode::off)
            vf << "oracle_max_rel_diff = " << detail::fmt17(rep.oracle_max_rel_diff) << '\n';
        for (const Verdict& v : rep.verdicts)
            vf << "verdict_" << v.label << " = " << (v.pass ? "pass" : "fail") << '\n';
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Parameter sweeps: independent deterministic cells, pooled execution.

inline void set_sweep_parameter(ScenarioSpec& spec, const std::string& key, double value) {
    if (key == "epsilon") spec.epsilon = value;
    else if (key == "nonlinearity.lambda") spec.nonlinearity.lambda = value;
    else if (key == "nonlinearity.sigma") spec.nonlinearity.sigma = value;
    else if (key == "nonlinearity.lambda_eps_exponent")
        spec.nonlinearity.lambda_eps_exponent = value;
    else if (key == "potential.omega")
        spec.potential.omega.assign(std::max<std::size_t>(spec.grid.dim, 1), value);
    else if (key == "initial.amplitude") spec.initial.amplitude = value;
    else if (key == "initial.width") spec.initial.width = value;
    else if (key == "initial.chirp") spec.initial.chirp = value;
    else if (key == "time.t_end") spec.time.t_end = value;
    else if (key == "time.dt_initial") spec.time.dt_initial = value;
    else if (key == "grid.half_width") spec.grid.half_width = value;
    else throw config_error("unknown sweep parameter '" + key + "'");
}

std::vector<ExperimentReport> sweep(const ScenarioSpec& base, const std::string& key,
                                    const std::vector<double>& values,
                                    const std::string& out_dir = "");

}  // namespace nlsp

#include "nlsp/sweep_impl.hpp"
