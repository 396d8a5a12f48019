#include "lamperti/cli/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "lamperti/bd_oracle.hpp"
#include "lamperti/estimators.hpp"
#include "lamperti/lyapunov.hpp"
#include "lamperti/urn.hpp"

#ifndef LAMPERTI_VERSION
#define LAMPERTI_VERSION "unknown"
#endif

namespace lamperti::cli {

namespace {

using json = nlohmann::json;

constexpr ExperimentInfo kExperiments[] = {
    {"excursion-tails", "Theorems on M_1 / eta_1 / xi^(alpha) tails",
     "tail exponents of excursion maximum, duration and weighted sum; exact oracle for P[M_1 >= x]"},
    {"max-scaling", "Theorem on running maxima", "growth exponent of max_{s<=t} X_s across replicas"},
    {"path-integrals", "Theorem on path integrals and Corollary on G_t",
     "growth of S^(alpha)_t and the centre of mass G_t, or their limits when positive-recurrent"},
    {"excursion-count", "Theorem on N_t", "growth exponent of the number of completed excursions, or N_t / t -> pi(0)"},
    {"stationary", "Theorem on the stationary distribution pi",
     "occupation frequencies L_t(x) / t against pi(x) and the identity E[ell_1(x)] = pi(x) E[eta_1]"},
    {"two-sided", "Theorems on separation of scales and two-sided G_t",
     "max and |min| growth with different exponents on the two half-lines; G_t -> +infinity"},
    {"central-bias", "Theorem on centrally biased random walks",
     "excursion-duration tail of the radial process ||xi_t|| with r = 1 - d - 2 rho / sigma^2"},
    {"urn-tau", "Theorem on urn moments", "tail of the urn time tau, tau = nu_{tau_q}, embedded moment estimates"},
    {"lyapunov-check", "Lemma on Lyapunov drift", "exact drift of f_{gamma,nu} against its leading term, drift signs"},
    {"classify", "Theorem on recurrence classification", "Lamperti constants c, s^2, r and the recurrence class"},
};

const ExperimentInfo& find_experiment(const std::string& name, int line) {
    for (const auto& e : kExperiments) {
        if (e.name == name) return e;
    }
    std::string names;
    for (const auto& e : kExperiments) names += (names.empty() ? "" : ", ") + std::string(e.name);
    throw ConfigError("experiment", line, "unknown experiment '" + name + "' (expected one of: " + names + ")");
}

// ---------------------------------------------------------------------------
// verdict bookkeeping

struct Ledger {
    json fits = json::array();
    json fit_tolerances = json::object();
    json checks = json::array();
    json notes = json::array();
    bool pass = true;

    void note(const std::string& s) { notes.push_back(s); }

    void fit(const std::string& functional, std::optional<double> theory, std::optional<double> fitted, double se,
             std::pair<double, double> window, std::string_view method, double tol, const std::string& tol_key,
             const std::string& skip_reason = {}) {
        std::string verdict;
        if (!skip_reason.empty() || !theory) {
            verdict = "skipped";
            note(functional + ": assertion skipped (" + (skip_reason.empty() ? "no theoretical exponent" : skip_reason) +
                 ")");
        } else if (!fitted) {
            verdict = "fail";
        } else {
            verdict = std::abs(*fitted - *theory) <= tol ? "pass" : "fail";
        }
        if (verdict == "fail") pass = false;
        fits.push_back({{"functional", functional},
                        {"theory_exponent", theory ? json(*theory) : json(nullptr)},
                        {"fitted_exponent", fitted ? json(*fitted) : json(nullptr)},
                        {"stderr", fitted ? json(se) : json(nullptr)},
                        {"window", {window.first, window.second}},
                        {"method", method},
                        {"verdict", verdict}});
        fit_tolerances[functional] = {{"tolerance_key", tol_key}, {"tolerance", tol}};
    }

    void check(const std::string& name, bool ok, json value, json expected, double tol, const std::string& tol_key,
               const std::string& detail = {}) {
        if (!ok) pass = false;
        json c = {{"name", name},       {"value", std::move(value)}, {"expected", std::move(expected)},
                  {"tolerance", tol},   {"tolerance_key", tol_key},  {"verdict", ok ? "pass" : "fail"}};
        if (!detail.empty()) c["detail"] = detail;
        checks.push_back(std::move(c));
    }

    void skip(const std::string& name, const std::string& reason) {
        checks.push_back({{"name", name}, {"verdict", "skipped"}, {"detail", reason}});
    }
};

struct Context {
    const Config& cfg;
    std::filesystem::path out;
    json report;
    Ledger ledger;
};

// ---------------------------------------------------------------------------
// serialisation helpers

json chain_json(const ChainSpec& spec) {
    json j = {{"family", family_name(spec)}};
    std::visit(
        [&](const auto& s) {
            using F = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<F, HalfLineDelta>) {
                j["delta"] = s.delta;
            } else if constexpr (std::is_same_v<F, TwoSided>) {
                j["delta_plus"] = s.delta_plus;
                j["delta_minus"] = s.delta_minus;
                j["q0"] = s.q0;
            } else if constexpr (std::is_same_v<F, CentralBias>) {
                j["dimension"] = s.dimension;
                j["rho"] = s.rho;
            } else {
                json k = json::array();
                for (const auto& a : s.kappa) k.push_back({{"value", a.value}, {"probability", a.probability}});
                j["kappa"] = k;
                j["expected_kappa"] = kappa_mean(s.kappa);
            }
        },
        spec);
    return j;
}

json params_json(const DriftParams& p) {
    return {{"c", p.c}, {"s2", p.s2}, {"r", p.r}, {"class", to_string(p.cls)}};
}

json growth_json(const std::optional<lyapunov::GrowthLaw>& g) {
    if (!g) return nullptr;
    return {{"regime", lyapunov::to_string(g->regime)}, {"exponent", g->exponent}, {"law", g->note}};
}

json table_json(const lyapunov::ExponentTable& t) {
    json j = {{"r", t.r}, {"class", to_string(t.cls)}, {"boundary", t.boundary}};
    if (t.boundary) j["boundary_note"] = "boundary: log-corrections dominate";
    j["m_tail"] = t.m_tail ? json(*t.m_tail) : json(nullptr);
    j["eta_tail"] = t.eta_tail ? json(*t.eta_tail) : json(nullptr);
    json xi = json::object();
    for (const auto& [a, v] : t.xi_tail) xi[format_number(a)] = v;
    j["xi_tail"] = xi;
    j["n_growth"] = growth_json(t.n_growth);
    j["max_growth"] = growth_json(t.max_growth);
    json s = json::object();
    for (const auto& [a, g] : t.s_growth) s[format_number(a)] = growth_json(g);
    j["s_growth"] = s;
    j["g_growth"] = growth_json(t.g_growth);
    return j;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

void write_excursions_csv(const std::filesystem::path& path, const std::vector<ExcursionRecord>& recs,
                          const std::vector<double>& alphas) {
    auto f = open_csv(path);
    f << "index,eta,max";
    for (double a : alphas) f << ",xi_" << format_number(a);
    f << ",censored\n";
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        f << i << ',' << r.eta << ',' << format_number(r.max);
        for (double x : r.xi) f << ',' << format_number(x);
        f << ',' << (r.censored ? 1 : 0) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const std::vector<PathSeries>& reps, bool with_min) {
    auto f = open_csv(path);
    const auto& layout = reps.front();
    f << "replica,t,N,running_max";
    if (with_min) f << ",running_min";
    for (double a : layout.alphas) f << ",S_" << format_number(a);
    f << ",G";
    for (double x : layout.sites) f << ",L_" << format_number(x);
    f << '\n';
    for (std::size_t r = 0; r < reps.size(); ++r) {
        for (const auto& p : reps[r].points) {
            f << r << ',' << p.t << ',' << p.excursions << ',' << format_number(p.running_max);
            if (with_min) f << ',' << format_number(p.running_min);
            for (double s : p.s_alpha) f << ',' << format_number(s);
            f << ',' << format_number(p.g);
            for (auto l : p.occupation) f << ',' << l;
            f << '\n';
        }
    }
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// shared analysis steps

struct TailInput {
    std::string name;
    std::vector<est::Observation> obs;
    est::ValueKind kind;
    std::optional<double> theory;
};

void fit_tail_functional(Context& ctx, const TailInput& in, const std::string& skip_reason = {}) {
    const double lo_q = ctx.cfg.get_double("estimator.window_lo_quantile", 0.90);
    const double hi_q = ctx.cfg.get_double("estimator.window_hi_quantile", 0.999);
    const auto count = ctx.cfg.get_int("estimator.thresholds", 20);
    const double tol = ctx.cfg.get_double("tolerance.tail", 0.15);
    if (!(0.0 <= lo_q && lo_q < hi_q && hi_q <= 1.0)) {
        throw ConfigError("estimator.window_lo_quantile", ctx.cfg.line("estimator.window_lo_quantile"),
                          "need 0 <= window_lo_quantile < window_hi_quantile <= 1");
    }
    std::pair<double, double> window{0.0, 0.0};
    try {
        const auto w = est::default_tail_window(in.obs, lo_q, hi_q);
        const auto thresholds = est::log_spaced_thresholds(std::max(1.0, w.lo), w.hi, static_cast<std::size_t>(count));
        const auto curve = est::empirical_survival(in.obs, thresholds, in.kind);
        for (const auto& r : curve.rejected) {
            ctx.ledger.note(in.name + ": threshold " + format_number(r.threshold) + " rejected: " + r.reason);
        }
        window = {thresholds.front(), thresholds.back()};
        const auto fit = est::fit_tail(curve, window.first, window.second);
        ctx.ledger.fit(in.name, in.theory, fit.exponent, fit.std_error, {fit.x_lo, fit.x_hi}, to_string(fit.method), tol,
                       "tolerance.tail", skip_reason);
    } catch (const ValidationError& e) {
        ctx.ledger.note(in.name + ": " + e.what());
        ctx.ledger.fit(in.name, in.theory, std::nullopt, 0.0, window, to_string(est::TailMethod::RankRegression), tol,
                       "tolerance.tail", skip_reason);
    }
}

void fit_growth(Context& ctx, const std::vector<PathSeries>& reps, const est::Functional& f,
                std::optional<double> theory, const std::string& tol_key, double default_tol,
                const std::string& skip_reason = {}) {
    const auto points = ctx.cfg.get_int("estimator.grid_points", 6);
    const double tol = ctx.cfg.get_double(tol_key, default_tol);
    const auto name = est::describe(f, reps.front());
    std::pair<double, double> window{0.0, 0.0};
    try {
        const auto [lo, hi] = est::top_grid_window(reps.front(), static_cast<std::size_t>(points));
        window = {static_cast<double>(lo), static_cast<double>(hi)};
        const auto fit = est::fit_scaling(reps, f, lo, hi);
        ctx.ledger.fit(name, theory, fit.slope, 0.0, window, "median-log-log", tol, tol_key, skip_reason);
        ctx.ledger.fits.back()["stderr"] = nullptr;
    } catch (const ValidationError& e) {
        ctx.ledger.note(name + ": " + e.what());
        ctx.ledger.fit(name, theory, std::nullopt, 0.0, window, "median-log-log", tol, tol_key, skip_reason);
    }
}

/// Mean over replicas of f at the final grid point, divided by t if `per_time`.
double pooled_final(const std::vector<PathSeries>& reps, const est::Functional& f, bool per_time) {
    double s = 0.0;
    for (const auto& r : reps) {
        const auto& p = r.points.back();
        s += est::evaluate(p, f) / (per_time ? static_cast<double>(p.t) : 1.0);
    }
    return s / static_cast<double>(reps.size());
}

std::vector<PathSeries> run_series(Context& ctx, const ChainSpec& spec, sim::SimConfig& sc) {
    const auto replicas = ctx.cfg.get_int("sim.replicas", 8);
    if (replicas < 3) throw ConfigError("sim.replicas", ctx.cfg.line("sim.replicas"), "need at least 3 replicas");
    if (sc.grid.empty()) throw ConfigError("sim.grid_kmax", ctx.cfg.line("sim.grid_kmax"), "empty time grid");
    auto reps = sim::run_replicas(spec, sc, static_cast<std::size_t>(replicas));
    ctx.report["samples"] = {{"replicas", replicas}, {"horizon", sc.horizon}, {"grid_points", sc.grid.size()}};
    return reps;
}

const HalfLineDelta* half_line(const ChainSpec& spec) { return std::get_if<HalfLineDelta>(&spec); }

void require_family(const ChainSpec& spec, std::initializer_list<std::string_view> allowed, const Config& cfg,
                    std::string_view experiment) {
    const auto name = family_name(spec);
    if (std::find(allowed.begin(), allowed.end(), name) != allowed.end()) return;
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError("chain.family", cfg.line("chain.family"),
                      "experiment " + std::string(experiment) + " needs chain.family in {" + list + "}, got " +
                          std::string(name));
}

// ---------------------------------------------------------------------------
// experiments

void excursion_tails(Context& ctx, const ChainSpec& spec, bool central_bias) {
    if (central_bias) {
        require_family(spec, {"central-bias"}, ctx.cfg, "central-bias");
    } else {
        require_family(spec, {"half-line-delta", "urn-embedded", "central-bias"}, ctx.cfg, "excursion-tails");
    }
    auto sc = parse_sim(ctx.cfg, central_bias ? std::vector<double>{} : std::vector<double>{2.0});
    const auto n = ctx.cfg.get_int("sim.excursions", 100000);
    if (n < 1) throw ConfigError("sim.excursions", ctx.cfg.line("sim.excursions"), "must be positive");
    const auto wanted = ctx.cfg.get_strings("check.functionals", central_bias ? std::vector<std::string>{"eta"}
                                                                              : std::vector<std::string>{"max", "eta", "xi"});
    for (const auto& w : wanted) {
        if (w != "max" && w != "eta" && w != "xi") {
            throw ConfigError("check.functionals", ctx.cfg.line("check.functionals"), "unknown functional '" + w + "'");
        }
    }
    const auto oracle_x = ctx.cfg.get_doubles("check.oracle_thresholds", {});
    const auto params = lamperti_params(spec);
    const auto table = lyapunov::exponent_table(params.r, sc.alphas);

    const auto recs = sim::sample_excursions(spec, static_cast<std::size_t>(n), sc);
    write_excursions_csv(ctx.out / "excursions.csv", recs, sc.alphas);
    std::size_t censored = 0;
    for (const auto& r : recs) censored += r.censored;
    ctx.report["samples"] = {{"excursions", n}, {"censored", censored},
                             {"excursion_cap", sc.excursion_cap ? json(*sc.excursion_cap) : json(nullptr)}};

    std::string skip;
    if (!(params.r > -1.0)) {
        skip = params.r == -1.0 ? "boundary r = -1: log-corrections dominate" : "tails undefined for r < -1";
    }
    auto want = [&](const char* w) { return std::find(wanted.begin(), wanted.end(), w) != wanted.end(); };
    if (want("max")) {
        TailInput in{"max", {}, est::ValueKind::Extremal, table.m_tail};
        for (const auto& r : recs) in.obs.push_back({r.max, r.censored});
        fit_tail_functional(ctx, in, skip);
    }
    if (want("eta")) {
        TailInput in{"eta", {}, est::ValueKind::Duration, table.eta_tail};
        for (const auto& r : recs) in.obs.push_back({static_cast<double>(r.eta), r.censored});
        fit_tail_functional(ctx, in, skip);
    }
    if (want("xi")) {
        for (std::size_t j = 0; j < sc.alphas.size(); ++j) {
            const double a = sc.alphas[j];
            std::optional<double> theory;
            if (table.xi_tail.count(a)) theory = table.xi_tail.at(a);
            TailInput in{"xi_" + format_number(a), {}, est::ValueKind::Extremal, theory};
            for (const auto& r : recs) in.obs.push_back({r.xi[j], r.censored});
            fit_tail_functional(ctx, in, skip);
        }
    }

    if (!oracle_x.empty()) {
        if (!half_line(spec)) {
            throw ConfigError("check.oracle_thresholds", ctx.cfg.line("check.oracle_thresholds"),
                              "the exact oracle needs chain.family = half-line-delta");
        }
        const double tol = ctx.cfg.get_double("tolerance.oracle_sigma", 4.0);
        std::vector<est::Observation> obs;
        for (const auto& r : recs) obs.push_back({r.max, r.censored});
        const auto curve = est::empirical_survival(obs, oracle_x, est::ValueKind::Extremal);
        json rows = json::array();
        for (const auto& rej : curve.rejected) {
            ctx.ledger.check("P[M >= " + format_number(rej.threshold) + "]", false, nullptr, nullptr, tol,
                             "tolerance.oracle_sigma", rej.reason);
        }
        for (const auto& p : curve.points) {
            const double exact = oracle::max_tail_exact(spec, static_cast<std::int64_t>(p.threshold));
            const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
            const double z = sigma > 0.0 ? std::abs(p.probability - exact) / sigma : (p.probability == exact ? 0.0 : 1e300);
            ctx.ledger.check("P[M >= " + format_number(p.threshold) + "]", z <= tol, p.probability, exact, tol,
                             "tolerance.oracle_sigma", "deviation " + format_number(z) + " binomial sigma");
        }
    }
    ctx.report["exponent_table"] = table_json(table);
}

void max_scaling(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"half-line-delta", "urn-embedded", "central-bias"}, ctx.cfg, "max-scaling");
    auto sc = parse_sim(ctx.cfg);
    const auto params = lamperti_params(spec);
    const auto table = lyapunov::exponent_table(params.r, sc.alphas);
    const auto reps = run_series(ctx, spec, sc);
    write_series_csv(ctx.out / "series.csv", reps, false);
    std::optional<double> theory;
    if (table.max_growth) theory = table.max_growth->exponent;
    fit_growth(ctx, reps, est::Functional::running_max(), theory, "tolerance.growth", 0.08,
               table.max_growth ? "" : "no growth law for r <= -1");
    ctx.report["exponent_table"] = table_json(table);
}

/// nu_alpha from the stationary oracle, or nullopt with a note.
std::optional<oracle::StationaryReport> try_stationary(Context& ctx, const ChainSpec& spec,
                                                       const std::vector<double>& alphas) {
    if (!half_line(spec)) {
        ctx.ledger.note("no stationary oracle for family " + std::string(family_name(spec)));
        return std::nullopt;
    }
    const double tol = ctx.cfg.get_double("oracle.mass_tolerance", 1e-9);
    try {
        return oracle::stationary(spec, tol, alphas);
    } catch (const ValidationError& e) {
        ctx.ledger.note(std::string("stationary oracle unavailable: ") + e.what());
        return std::nullopt;
    }
}

json stationary_json(const oracle::StationaryReport& st, std::size_t head = 11) {
    json pi = json::array();
    for (std::size_t x = 0; x < std::min(head, st.pi.size()); ++x) pi.push_back(st.pi[x]);
    json nu = json::array();
    for (const auto& v : st.nu) {
        nu.push_back({{"alpha", v.alpha},
                      {"finite", v.finite},
                      {"value", v.finite ? json(v.value) : json("infinite")},
                      {"tail_bound", v.finite ? json(v.tail_bound) : json(nullptr)}});
    }
    return {{"pi_head", pi},
            {"sites_summed", st.pi.size()},
            {"truncation_bound", st.truncation_bound},
            {"expected_eta", st.expected_eta},
            {"nu", nu}};
}

void path_integrals(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"half-line-delta", "urn-embedded", "central-bias"}, ctx.cfg, "path-integrals");
    auto sc = parse_sim(ctx.cfg, {1.0});
    const auto wanted = ctx.cfg.get_strings("check.functionals", {"S", "G"});
    const bool do_s = std::find(wanted.begin(), wanted.end(), "S") != wanted.end();
    const bool do_g = std::find(wanted.begin(), wanted.end(), "G") != wanted.end();
    const auto params = lamperti_params(spec);
    const auto table = lyapunov::exponent_table(params.r, sc.alphas);
    const auto reps = run_series(ctx, spec, sc);
    write_series_csv(ctx.out / "series.csv", reps, false);
    const double limit_tol = ctx.cfg.get_double("tolerance.limit_rel", 0.05);

    std::vector<double> oracle_alphas = sc.alphas;
    if (std::find(oracle_alphas.begin(), oracle_alphas.end(), 1.0) == oracle_alphas.end()) oracle_alphas.push_back(1.0);
    std::optional<oracle::StationaryReport> st;
    if (params.cls == RecurrenceClass::PositiveRecurrent) {
        st = try_stationary(ctx, spec, oracle_alphas);
        if (st) ctx.report["oracle"] = stationary_json(*st);
    }
    auto nu_of = [&](double a) -> std::optional<double> {
        if (!st) return std::nullopt;
        for (const auto& v : st->nu) {
            if (v.alpha == a && v.finite) return v.value;
        }
        return std::nullopt;
    };
    auto limit_check = [&](const std::string& name, double value, double alpha) {
        const auto nu = nu_of(alpha);
        if (!nu) {
            ctx.ledger.skip(name, "no finite oracle value for nu_" + format_number(alpha));
            return;
        }
        const double rel = std::abs(value - *nu) / *nu;
        ctx.ledger.check(name, rel <= limit_tol, value, *nu, limit_tol, "tolerance.limit_rel",
                         "relative error " + format_number(rel) + " (mean over replicas at the final grid time)");
    };

    if (do_s) {
        for (std::size_t j = 0; j < sc.alphas.size(); ++j) {
            const double a = sc.alphas[j];
            const auto it = table.s_growth.find(a);
            if (it == table.s_growth.end()) {
                fit_growth(ctx, reps, est::Functional::path_integral(j), std::nullopt, "tolerance.growth", 0.08,
                           "no growth law for r <= -1");
                continue;
            }
            fit_growth(ctx, reps, est::Functional::path_integral(j), it->second.exponent, "tolerance.growth", 0.08);
            if (it->second.regime == lyapunov::Regime::Linear) {
                limit_check("S_" + format_number(a) + " / t -> nu_" + format_number(a),
                            pooled_final(reps, est::Functional::path_integral(j), true), a);
            }
        }
    }
    if (do_g) {
        if (!table.g_growth) {
            fit_growth(ctx, reps, est::Functional::centre_of_mass(), std::nullopt, "tolerance.growth", 0.08,
                       "no growth law for r <= -1");
        } else if (table.g_growth->regime == lyapunov::Regime::Limit) {
            limit_check("G -> nu_1", pooled_final(reps, est::Functional::centre_of_mass(), false), 1.0);
        } else {
            fit_growth(ctx, reps, est::Functional::centre_of_mass(), table.g_growth->exponent, "tolerance.growth", 0.08);
        }
    }
    ctx.report["exponent_table"] = table_json(table);
}

void excursion_count(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"half-line-delta", "urn-embedded", "central-bias"}, ctx.cfg, "excursion-count");
    auto sc = parse_sim(ctx.cfg);
    const auto params = lamperti_params(spec);
    const auto table = lyapunov::exponent_table(params.r, sc.alphas);
    const auto reps = run_series(ctx, spec, sc);
    write_series_csv(ctx.out / "series.csv", reps, false);
    if (!table.n_growth) {
        fit_growth(ctx, reps, est::Functional::count(), std::nullopt, "tolerance.growth", 0.08,
                   "no growth law for r <= -1");
    } else if (table.n_growth->regime == lyapunov::Regime::Power) {
        fit_growth(ctx, reps, est::Functional::count(), table.n_growth->exponent, "tolerance.growth", 0.08);
    } else {
        const double tol = ctx.cfg.get_double("tolerance.limit_rel", 0.02);
        const double value = pooled_final(reps, est::Functional::count(), true);
        if (const auto* h = half_line(spec)) {
            // pi(0) = 1 / E[eta_1] = (delta - 1) / (2 delta), no truncation involved.
            const double pi0 = 1.0 / oracle::delta_weight_total(h->delta);
            const double rel = std::abs(value - pi0) / pi0;
            ctx.report["oracle"] = {{"pi0", pi0}, {"expected_eta", 1.0 / pi0}};
            ctx.ledger.check("N_t / t -> pi(0)", rel <= tol, value, pi0, tol, "tolerance.limit_rel",
                             "relative error " + format_number(rel) + " (mean over replicas at the final grid time)");
        } else {
            fit_growth(ctx, reps, est::Functional::count(), 1.0, "tolerance.growth", 0.08);
        }
    }
    ctx.report["exponent_table"] = table_json(table);
}

void stationary(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"half-line-delta"}, ctx.cfg, "stationary");
    const auto params = lamperti_params(spec);
    if (params.cls != RecurrenceClass::PositiveRecurrent) {
        throw ConfigError("chain.delta", ctx.cfg.line("chain.delta"),
                          "stationary needs a positive-recurrent chain (delta > 1); this chain is " +
                              std::string(to_string(params.cls)));
    }
    auto sc = parse_sim(ctx.cfg, {}, {0, 1, 2, 5, 10});
    for (double x : sc.tracked_sites) {
        if (x < 0 || x != std::floor(x)) {
            throw ConfigError("sim.tracked_sites", ctx.cfg.line("sim.tracked_sites"), "sites must be integers >= 0");
        }
    }
    const double occ_tol = ctx.cfg.get_double("tolerance.occupation_abs", 0.02);
    const double id_tol = ctx.cfg.get_double("tolerance.identity", 1e-10);
    const double mass_tol = ctx.cfg.get_double("oracle.mass_tolerance", 1e-9);
    const auto st = oracle::stationary(spec, mass_tol, std::vector<double>{1.0});
    ctx.report["oracle"] = stationary_json(st);

    const auto reps = run_series(ctx, spec, sc);
    write_series_csv(ctx.out / "series.csv", reps, false);
    for (std::size_t j = 0; j < sc.tracked_sites.size(); ++j) {
        const auto x = static_cast<std::int64_t>(sc.tracked_sites[j]);
        const double pi = x < static_cast<std::int64_t>(st.pi.size()) ? st.pi[static_cast<std::size_t>(x)] : 0.0;
        const double value = pooled_final(reps, est::Functional::occupation(j), true);
        ctx.ledger.check("L_t(" + std::to_string(x) + ") / t -> pi(" + std::to_string(x) + ")",
                         std::abs(value - pi) <= occ_tol, value, pi, occ_tol, "tolerance.occupation_abs");
        const double green = oracle::green_per_excursion(spec, x);
        const double err = std::abs(green - pi * st.expected_eta);
        ctx.ledger.check("E[ell_1(" + std::to_string(x) + ")] = pi(" + std::to_string(x) + ") E[eta_1]", err <= id_tol,
                         green, pi * st.expected_eta, id_tol, "tolerance.identity");
    }
    const double total = oracle::delta_weight_total(std::get<HalfLineDelta>(spec).delta);
    const double rel = std::abs(st.expected_eta - total) / total;
    ctx.ledger.check("E[eta_1] = 2 delta / (delta - 1)", rel <= id_tol, st.expected_eta, total, id_tol,
                     "tolerance.identity");
}

void two_sided(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"two-sided"}, ctx.cfg, "two-sided");
    const auto sides = two_sided_params(std::get<TwoSided>(spec));
    const double rp = sides[0].r, rm = sides[1].r;
    if (!(-1.0 < rp && rp < rm && rm <= 1.0)) {
        throw ConfigError("chain.delta_plus", ctx.cfg.line("chain.delta_plus"),
                          "separation of scales needs -1 < r+ < r- <= 1 (got r+ = " + format_number(rp) +
                              ", r- = " + format_number(rm) + ")");
    }
    auto sc = parse_sim(ctx.cfg, {1.0});
    const auto reps = run_series(ctx, spec, sc);
    write_series_csv(ctx.out / "series.csv", reps, true);
    const double min_exponent = 0.5 * (1.0 + rp) / (1.0 + rm);
    fit_growth(ctx, reps, est::Functional::running_max(), 0.5, "tolerance.growth", 0.08);
    fit_growth(ctx, reps, est::Functional::running_min_abs(), min_exponent, "tolerance.min_growth", 0.07);
    fit_growth(ctx, reps, est::Functional::centre_of_mass(), 0.5, "tolerance.growth", 0.08);
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& r : reps) smallest = std::min(smallest, r.points.back().g);
    ctx.ledger.check("G > 0 at the final grid time (smallest over replicas)", smallest > 0.0, smallest, "> 0", 0.0,
                     "none (sign check)");
    ctx.report["theory"] = {{"max_exponent", 0.5}, {"min_abs_exponent", min_exponent}, {"g_exponent", 0.5}};
    ctx.report["exponent_table"] = json{{"plus", table_json(lyapunov::exponent_table(rp, sc.alphas))},
                                    {"minus", table_json(lyapunov::exponent_table(rm, sc.alphas))}};
}

void urn_tau(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"urn-embedded"}, ctx.cfg, "urn-tau");
    const auto& kappa = std::get<UrnEmbedded>(spec).kappa;
    const auto seed = static_cast<std::uint64_t>(ctx.cfg.get_int("sim.master_seed", 1));
    const auto workers = ctx.cfg.get_int("sim.workers", 1);
    const auto runs = ctx.cfg.get_int("sim.runs", 100000);
    const auto horizon = ctx.cfg.get_int("sim.horizon", 10'000'000);
    if (runs < 1) throw ConfigError("sim.runs", ctx.cfg.line("sim.runs"), "must be positive");
    if (horizon < 2) throw ConfigError("sim.horizon", ctx.cfg.line("sim.horizon"), "must be >= 2");
    if (workers < 1) throw ConfigError("sim.workers", ctx.cfg.line("sim.workers"), "must be positive");

    struct Row {
        std::optional<std::int64_t> tau, tau_q;
        std::size_t visits;
        std::int64_t steps;
        bool consistent;
    };
    std::vector<Row> rows(static_cast<std::size_t>(runs));
    parallel_for(rows.size(), static_cast<unsigned>(workers), [&](std::size_t i) {
        auto stream = derive_stream(seed, i);
        const auto run = urn::run_urn(kappa, horizon, stream);
        bool ok = true;
        if (run.tau) ok = run.tau_q && run.nu[static_cast<std::size_t>(*run.tau_q - 1)] == *run.tau;
        rows[i] = {run.tau, run.tau_q, run.nu.size(), run.steps, ok};
    });

    {
        auto f = open_csv(ctx.out / "urn.csv");
        f << "index,tau,tau_q,axis_visits,steps,censored\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            f << i << ',' << (r.tau ? std::to_string(*r.tau) : "") << ',' << (r.tau_q ? std::to_string(*r.tau_q) : "")
              << ',' << r.visits << ',' << r.steps << ',' << (r.tau ? 0 : 1) << '\n';
        }
    }

    std::size_t censored = 0, mismatches = 0;
    std::vector<est::Observation> obs;
    for (const auto& r : rows) {
        censored += !r.tau;
        mismatches += !r.consistent;
        obs.push_back({static_cast<double>(r.tau ? *r.tau : r.steps), !r.tau});
    }
    ctx.report["samples"] = {{"runs", runs}, {"horizon", horizon}, {"censored", censored}};
    const double threshold = urn::tau_threshold(kappa_mean(kappa));
    ctx.report["theory"] = {{"tau_moment_threshold", threshold}};
    std::optional<double> theory;
    if (threshold > 0.0) theory = threshold;
    fit_tail_functional(ctx, {"tau", obs, est::ValueKind::Duration, theory},
                        threshold > 0.0 ? "" : "tau moment threshold is not positive");
    ctx.ledger.check("tau = nu_{tau_q} on every uncensored run", mismatches == 0, mismatches, 0, 0.0,
                     "none (exact equality)");

    if (ctx.cfg.has("check.moment_x")) {
        const auto x = ctx.cfg.get_int("check.moment_x");
        const auto n = ctx.cfg.get_int("check.moment_samples", 100000);
        const double k = ctx.cfg.get_double("tolerance.moment_se", 3.0);
        const auto m = urn::embedded_moment_check(kappa, x, static_cast<std::size_t>(n), seed);
        ctx.report["embedded_moments"] = {{"x", x},
                                          {"samples", n},
                                          {"mean", m.mean},
                                          {"mean_stderr", m.mean_stderr},
                                          {"second_moment", m.second_moment},
                                          {"second_moment_stderr", m.second_moment_stderr}};
        const auto in_range = [&](const std::string& key, double value, double se, double scale) {
            const auto range = ctx.cfg.get_doubles(key);
            if (range.size() != 2 || !(range[0] <= range[1])) {
                throw ConfigError(key, ctx.cfg.line(key), "expected 'lo, hi'");
            }
            const double v = value / scale, s = se / scale;
            const double gap = std::max({0.0, range[0] - v, v - range[1]});
            ctx.ledger.check(key.substr(6), gap <= k * s, v, json{range[0], range[1]}, k, "tolerance.moment_se",
                             "distance to range " + format_number(gap) + ", standard error " + format_number(s));
        };
        if (ctx.cfg.has("check.mean_range")) in_range("check.mean_range", m.mean, m.mean_stderr, 1.0);
        if (ctx.cfg.has("check.second_over_x_range")) {
            in_range("check.second_over_x_range", m.second_moment, m.second_moment_stderr, static_cast<double>(x));
        }
    }
    ctx.report["exponent_table"] = table_json(lyapunov::exponent_table(lamperti_params(spec).r));
}

void lyapunov_check(Context& ctx, const ChainSpec& spec) {
    require_family(spec, {"half-line-delta"}, ctx.cfg, "lyapunov-check");
    const auto params = lamperti_params(spec);
    if (!(params.r > -1.0)) {
        throw ConfigError("chain.delta", ctx.cfg.line("chain.delta"), "the drift lemma needs r > -1");
    }
    const auto x_max = ctx.cfg.get_int("check.x_max", 10000);
    const auto a_max = ctx.cfg.get_int("check.a_max", 100);
    const double ratio_tol = ctx.cfg.get_double("tolerance.ratio", 0.1);
    const double nu0_tol = ctx.cfg.get_double("tolerance.nu0", 1e-3);
    const auto nus = ctx.cfg.get_doubles("check.sign_nus", {-1.0, -0.5, 0.5, 1.0});
    if (x_max < 2) throw ConfigError("check.x_max", ctx.cfg.line("check.x_max"), "must be >= 2");
    const double gamma = 1.0 + params.r;
    const auto xm = static_cast<double>(x_max);

    const double drift = lyapunov::drift_f(spec, gamma, 1.0, x_max);
    const double lead = lyapunov::leading_drift(params, 1.0, xm);
    const double ratio = drift / lead;
    ctx.ledger.check("drift / leading term at x = " + std::to_string(x_max) + " (gamma = 1 + r, nu = 1)",
                     std::abs(ratio - 1.0) <= ratio_tol, ratio, 1.0, ratio_tol, "tolerance.ratio");

    for (double nu : nus) {
        if (nu == 0.0) continue;
        // Smallest A with sign(drift) = sign(nu) on [A, x_max].
        std::int64_t a = x_max + 1;
        for (std::int64_t x = x_max; x >= 1; --x) {
            const double d = lyapunov::drift_f(spec, gamma, nu, x);
            if ((d > 0.0) != (nu > 0.0) || d == 0.0) break;
            a = x;
        }
        ctx.ledger.check("drift sign = sign(nu) on [A, " + std::to_string(x_max) + "], nu = " + format_number(nu),
                         a <= a_max, a, "<= " + std::to_string(a_max), static_cast<double>(a_max), "check.a_max");
    }

    const double d0 = lyapunov::drift_f(spec, gamma, 0.0, x_max);
    const double bound = nu0_tol * std::pow(xm, params.r - 1.0);
    ctx.ledger.check("|drift| at nu = 0 is below tolerance * x^(r-1)", std::abs(d0) <= bound, d0, 0.0, nu0_tol,
                     "tolerance.nu0", "bound " + format_number(bound));
    ctx.report["exponent_table"] = table_json(lyapunov::exponent_table(params.r));
}

void classify_experiment(Context& ctx, const ChainSpec& spec) {
    if (std::holds_alternative<TwoSided>(spec)) {
        const auto sides = two_sided_params(std::get<TwoSided>(spec));
        ctx.report["params"] = json{{"plus", params_json(sides[0])}, {"minus", params_json(sides[1])}};
    }
    ctx.report["exponent_table"] = table_json(lyapunov::exponent_table(lamperti_params(spec).r));
}

std::set<std::string> allowed_keys() {
    return {"experiment", "chain.", "sim.", "estimator.", "tolerance.", "check.", "oracle."};
}

} // namespace

std::span<const ExperimentInfo> list_experiments() { return kExperiments; }

void print_experiments(std::ostream& out) {
    std::size_t w = 0, v = 0;
    for (const auto& e : kExperiments) {
        w = std::max(w, e.name.size());
        v = std::max(v, e.theorem.size());
    }
    for (const auto& e : kExperiments) {
        out << std::left << std::setw(static_cast<int>(w + 2)) << e.name << std::setw(static_cast<int>(v + 2))
            << e.theorem << e.summary << '\n';
    }
}

ChainSpec parse_chain(const Config& cfg) {
    const auto family = cfg.get_string("chain.family");
    const auto line = cfg.line("chain.family");
    ChainSpec spec;
    std::set<std::string> keys{"chain.family"};
    if (family == "half-line-delta") {
        spec = HalfLineDelta{cfg.get_double("chain.delta")};
        keys.insert("chain.delta");
    } else if (family == "two-sided") {
        spec = TwoSided{cfg.get_double("chain.delta_plus"), cfg.get_double("chain.delta_minus"),
                        cfg.get_double("chain.q0", 0.5)};
        keys.insert({"chain.delta_plus", "chain.delta_minus", "chain.q0"});
    } else if (family == "central-bias") {
        spec = CentralBias{static_cast<int>(cfg.get_int("chain.dimension", 2)), cfg.get_double("chain.rho")};
        keys.insert({"chain.dimension", "chain.rho"});
    } else if (family == "urn-embedded") {
        // chain.kappa = value:probability, value:probability, ...
        KappaTable table;
        const auto items = cfg.get_strings("chain.kappa", {});
        if (items.empty()) throw ConfigError("chain.kappa", cfg.line("chain.kappa"), "required for urn-embedded");
        for (const auto& item : items) {
            const auto colon = item.find(':');
            try {
                if (colon == std::string::npos) {
                    table.push_back({std::stoll(item), 1.0});
                } else {
                    table.push_back({std::stoll(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
                }
            } catch (const std::logic_error&) {
                throw ConfigError("chain.kappa", cfg.line("chain.kappa"), "bad entry '" + item + "' (want value:probability)");
            }
        }
        spec = UrnEmbedded{table};
        keys.insert("chain.kappa");
    } else {
        throw ConfigError("chain.family", line,
                          "unknown family '" + family + "' (half-line-delta, two-sided, central-bias, urn-embedded)");
    }
    for (const auto& [k, v] : cfg.raw()) {
        if (k.rfind("chain.", 0) == 0 && !keys.count(k)) {
            throw ConfigError(k, cfg.line(k), "not a parameter of family " + family);
        }
    }
    try {
        validate(spec);
    } catch (const ValidationError& e) {
        throw ConfigError("chain", line, e.what());
    }
    return spec;
}

sim::SimConfig parse_sim(const Config& cfg, std::vector<double> default_alphas, std::vector<double> default_sites) {
    sim::SimConfig sc;
    sc.master_seed = static_cast<std::uint64_t>(cfg.get_int("sim.master_seed", 1));
    const auto workers = cfg.get_int("sim.workers", 1);
    if (workers < 1) throw ConfigError("sim.workers", cfg.line("sim.workers"), "must be positive");
    sc.workers = static_cast<unsigned>(workers);
    const auto cap = cfg.get_string("sim.excursion_cap", "1000000");
    if (cap == "none") {
        sc.excursion_cap = std::nullopt;
    } else {
        sc.excursion_cap = cfg.get_int("sim.excursion_cap", 1000000);
    }
    sc.horizon = cfg.get_int("sim.horizon", std::int64_t{1} << 22);
    int kmax = 0;
    while ((std::int64_t{1} << (kmax + 1)) <= sc.horizon && kmax < 62) ++kmax;
    const auto k_lo = cfg.get_int("sim.grid_kmin", 0);
    const auto k_hi = cfg.get_int("sim.grid_kmax", kmax);
    sc.alphas = cfg.get_doubles("sim.alphas", default_alphas);
    sc.tracked_sites = cfg.get_doubles("sim.tracked_sites", default_sites);
    try {
        sc.grid = sim::dyadic_grid(static_cast<int>(k_lo), static_cast<int>(k_hi));
        sim::validate(sc);
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError("sim", 0, e.what());
    }
    return sc;
}

Outcome run_experiment(const Config& cfg, const std::filesystem::path& out) {
    cfg.check_known(allowed_keys());
    const auto name = cfg.get_string("experiment");
    const auto& info = find_experiment(name, cfg.line("experiment"));
    const auto spec = parse_chain(cfg);
    std::filesystem::create_directories(out);

    Context ctx{cfg, out, json::object(), {}};
    ctx.report["experiment"] = info.name;
    ctx.report["theorem"] = info.theorem;
    ctx.report["version"] = LAMPERTI_VERSION;
    ctx.report["chain"] = chain_json(spec);
    ctx.report["params"] = params_json(lamperti_params(spec));

    const auto t0 = std::chrono::steady_clock::now();
    if (name == "excursion-tails") excursion_tails(ctx, spec, false);
    else if (name == "central-bias") excursion_tails(ctx, spec, true);
    else if (name == "max-scaling") max_scaling(ctx, spec);
    else if (name == "path-integrals") path_integrals(ctx, spec);
    else if (name == "excursion-count") excursion_count(ctx, spec);
    else if (name == "stationary") stationary(ctx, spec);
    else if (name == "two-sided") two_sided(ctx, spec);
    else if (name == "urn-tau") urn_tau(ctx, spec);
    else if (name == "lyapunov-check") lyapunov_check(ctx, spec);
    else classify_experiment(ctx, spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ctx.report["fits"] = ctx.ledger.fits;
    ctx.report["fit_tolerances"] = ctx.ledger.fit_tolerances;
    ctx.report["checks"] = ctx.ledger.checks;
    ctx.report["notes"] = ctx.ledger.notes;
    ctx.report["wall_clock_seconds"] = secs;
    ctx.report["config"] = cfg.resolved();
    ctx.report["pass"] = ctx.ledger.pass;

    {
        std::ofstream f(out / "report.json", std::ios::binary);
        f << std::setw(2) << ctx.report << '\n';
    }
    {
        std::ofstream f(out / "config.echo", std::ios::binary);
        f << cfg.echo();
    }
    return {ctx.report, ctx.ledger.pass};
}

int run(const RunOptions& options, std::ostream& log) {
    try {
        auto cfg = Config::load(options.config);
        if (options.seed) cfg.set("sim.master_seed", std::to_string(*options.seed));
        if (options.workers) cfg.set("sim.workers", std::to_string(*options.workers));
        if (options.experiment) cfg.set("experiment", *options.experiment);
        const auto outcome = run_experiment(cfg, options.out);
        const auto& rep = outcome.report;
        log << rep["experiment"].get<std::string>() << " (" << rep["chain"]["family"].get<std::string>() << ", r = "
            << format_number(rep["params"].contains("r") ? rep["params"]["r"].get<double>() : 0.0) << ")\n";
        for (const auto& f : rep["fits"]) {
            log << "  fit   " << f["functional"].get<std::string>() << ": fitted " << f["fitted_exponent"].dump()
                << " theory " << f["theory_exponent"].dump() << " -> " << f["verdict"].get<std::string>() << '\n';
        }
        for (const auto& c : rep["checks"]) {
            log << "  check " << c["name"].get<std::string>() << " -> " << c["verdict"].get<std::string>() << '\n';
        }
        for (const auto& n : rep["notes"]) log << "  note  " << n.get<std::string>() << '\n';
        log << (outcome.pass ? "PASS" : "FAIL") << " (report: " << (options.out / "report.json").string() << ")\n";
        return outcome.pass ? kPass : kToleranceFail;
    } catch (const ValidationError& e) {
        log << e.what() << '\n';
        return kConfigError;
    } catch (const UnsupportedError& e) {
        log << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

} // namespace lamperti::cli
