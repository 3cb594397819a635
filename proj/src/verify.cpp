#include "kahler/verify.hpp"

#include "kahler/ckem_solver.hpp"
#include "kahler/error.hpp"
#include "kahler/format.hpp"
#include "kahler/mabuchi.hpp"
#include "kahler/quantization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace kahler {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

class Recorder {
public:
    explicit Recorder(CriterionResult& r) : r_(r) {}

    void below(const std::string& name, double v, double bound) {
        add(name, v, "<" + fmt_num(bound), v < bound);
    }
    void above(const std::string& name, double v, double bound) {
        add(name, v, ">" + fmt_num(bound), v > bound);
    }
    void at_most(const std::string& name, double v, double bound) {
        add(name, v, "<=" + fmt_num(bound), v <= bound);
    }
    void at_least(const std::string& name, double v, double bound) {
        add(name, v, ">=" + fmt_num(bound), v >= bound);
    }
    void inside(const std::string& name, double v, double lo, double hi) {
        add(name, v, "[" + fmt_num(lo) + ";" + fmt_num(hi) + "]", v >= lo && v <= hi);
    }
    void flag(const std::string& name, bool ok, const std::string& rule = "true") {
        add(name, ok ? 1.0 : 0.0, rule, ok);
    }
    void failed(const std::string& name, const std::string& why) {
        add(name, kNaN, "no error", false);
        note(name + ": " + why);
    }
    void note(const std::string& s) {
        if (!r_.note.empty()) r_.note += "; ";
        r_.note += s;
    }

private:
    void add(const std::string& name, double v, std::string rule, bool ok) {
        r_.checks.push_back({name, v, std::move(rule), ok && !std::isnan(v)});
    }
    CriterionResult& r_;
};

struct Context {
    const VerifyOptions& opt;
    double tol(double t) const { return t * opt.tolerance_scale; }
    std::mt19937_64 rng(int id) const { return std::mt19937_64(opt.seed * 1000003ULL + static_cast<std::uint64_t>(id)); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double kappa0_cached() {
    static const double k0 = kappa_zero(2, 1);
    return k0;
}

BumpDirection random_bump(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-0.6, 0.6), r(0.1, 0.35), a(-1.0, 1.0);
    return BumpDirection::make(c(rng), r(rng), a(rng));
}

// ---------------------------------------------------------------- ruled surface

void c1_futaki(const Context& cx, Recorder& rec) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double b : {1.1, 1.5, 2.0, 3.0}) {
        const double kappa = (1 + b * b) / (2 * b);
        const auto R = futaki_residual(RuledSurfaceData::make(2, 1, kappa));
        const auto tag = fmt::format("b={}", b);
        rec.below("residual_at_" + tag, R(b), cx.tol(1e-10));
        rec.above("residual_at_" + tag + "-0.1", R(b - 0.1), 1e-4);
        rec.above("residual_at_" + tag + "+0.1", R(b + 0.1), 1e-4);
    }
    rec.flag("runtime_under_1s", seconds_since(t0) < 1.0);
}

void c2_ckem_profile(const Context& cx, Recorder& rec) {
    const double k0 = kappa0_cached();
    for (double dk : {0.5, 2.0}) {
        const auto X = RuledSurfaceData::make(2, 1, k0 + dk);
        const auto sol = solve_P(X);
        const auto th = sol.profile();
        double dev = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double z = -1.0 + 2.0 * i / 4000.0;
            dev = std::max(dev, std::abs(weighted_scalar_curvature(th, X, sol.weight(), z) - sol.c));
        }
        rec.below(fmt::format("sup_W_minus_c_kappa0+{}", dk), dev, cx.tol(1e-8));
    }
}

void c3_kappa0(const Context& cx, Recorder& rec) {
    const auto t0 = std::chrono::steady_clock::now();
    const double k0 = kappa_zero(2, 1);
    const double elapsed = seconds_since(t0);
    const auto sol = solve_P(RuledSurfaceData::make(2, 1, k0));
    const auto m = interior_minimum(sol.P);
    rec.flag("interior_minimum_exists", m.exists);
    rec.below("abs_min_P", std::abs(m.value), cx.tol(1e-8));
    rec.below("abs_dP_at_argmin", std::abs(sol.P.derivative()(m.z)), cx.tol(1e-8));
    const auto below = classify(solve_P(RuledSurfaceData::make(2, 1, k0 - 1e-3)));
    const auto above = classify(solve_P(RuledSurfaceData::make(2, 1, k0 + 1e-3)));
    rec.flag("label_below_is_NegativeSomewhere", below == CkemLabel::NegativeSomewhere);
    rec.flag("label_at_is_DoubleRoot", classify(sol) == CkemLabel::DoubleRoot);
    rec.flag("label_above_is_ExistsCKEM", above == CkemLabel::ExistsCKEM);
    rec.flag("runtime_under_10s", elapsed < 10.0);
    rec.note(fmt::format("kappa0(g=2,l=1) = {:.12f}, argmin z = {:.12f}", k0, m.z));
}

void c4_euler_lagrange(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(4);
    const double kappa = kappa0_cached() + 1.0;
    const auto sol = solve_P(RuledSurfaceData::make(2, 1, kappa));
    const auto rule = gauss_legendre(default_config().quad_order);
    const auto ustar = to_symplectic(sol.profile(), rule);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto v = random_bump(rng);
        std::vector<double> vpp(rule.size());
        for (std::size_t n = 0; n < rule.size(); ++n) vpp[n] = v(rule.nodes[n]);
        worst = std::max(worst, std::abs(mabuchi_gradient_amt(ustar, sol, vpp)));
    }
    rec.below("max_abs_gradient_10_bumps", worst, cx.tol(1e-7));
}

void c5_probe(const Context& cx, Recorder& rec) {
    const double kappa = 0.5 * (1.0 + kappa0_cached());
    const auto sol = solve_P(RuledSurfaceData::make(2, 1, kappa));
    rec.flag("label_is_NegativeSomewhere", classify(sol) == CkemLabel::NegativeSomewhere);
    const auto bump = auto_bump(sol);
    std::vector<double> ks;
    for (int k = 1; k <= 64; ++k) ks.push_back(k);
    const auto res = unboundedness_probe(sol, bump, ks);
    rec.flag("strictly_decreasing_k1_to_64", res.strictly_decreasing);
    rec.at_least("drop_E1_minus_E64", res.energy.front() - res.energy.back(), 100.0);
    rec.below("slope_relative_error", std::abs(res.fitted_slope / res.predicted_slope - 1.0), cx.tol(0.02));
    rec.note(fmt::format("predicted slope {:.6g}, fitted {:.6g}", res.predicted_slope, res.fitted_slope));
}

void c6_path(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(6);
    const double kappa = kappa0_cached() + 1.0;
    const auto sol = solve_P(RuledSurfaceData::make(2, 1, kappa));
    const auto base = Profile::canonical(kappa);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        const auto a = random_profile(rng, kappa), b = random_profile(rng, kappa);
        const double loop = mabuchi_path_integral(straight_path(base, a), sol) +
                            mabuchi_path_integral(straight_path(a, b), sol) +
                            mabuchi_path_integral(straight_path(b, base), sol);
        worst = std::max(worst, std::abs(loop));
    }
    rec.below("max_abs_triangle_loop", worst, cx.tol(1e-8));
    std::vector<double> lam;
    for (int i = 0; i < 10; ++i) lam.push_back(calibrate_amt_constant(sol, random_profile(rng, kappa)));
    const auto [lo, hi] = std::minmax_element(lam.begin(), lam.end());
    rec.above("min_lambda", *lo, 0.0);
    rec.below("lambda_relative_spread_10_endpoints", (*hi - *lo) / *lo, cx.tol(1e-5));
    rec.note(fmt::format("lambda = {:.10f}", lam.front()));
}

// ---------------------------------------------------------------- toy model

void c7_bergman(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(7);
    const auto g = MomentumGrid::make();
    const auto phi = RadialPotential::random(g, rng);
    double worst_split = 0.0, worst_trace = 0.0;
    for (double p : {2.0, 4.0}) {
        const auto m = ToyModel::weighted(1.0, p);
        const auto Psi = [p](double t) { return std::pow(t, 1 - p); };
        const auto Phi2 = [p](double t) { return std::pow(t, -(p + 1)); };
        for (int k : {8, 16, 32}) {
            const auto sp = eigenvalues(k, m);
            const auto rho = rho_p(phi, k, m);
            const auto B1 = bergman_density(phi, k, m, Psi, Psi);
            const auto B2 = bergman_density(phi, k, m, Psi, Phi2);
            for (std::size_t i = 0; i < g->size(); ++i)
                worst_split = std::max(worst_split, std::abs(rho[i] - (B1[i] - sp.c / (4.0 * k) * B2[i])) / std::abs(rho[i]));
            worst_trace = std::max(worst_trace, std::abs(integrate_vol(phi, k, rho) / sp.trace_p - 1.0));
        }
        std::vector<double> ks, e;
        for (int k : {8, 16, 32, 64, 128}) {
            ks.push_back(k);
            e.push_back(std::abs(2 * kPi * C_k(k, m, *g) - 1.0));
        }
        rec.inside(fmt::format("C_k_slope_p={}", p), loglog_slope(ks, e), -2.0 - cx.tol(0.1), -2.0 + cx.tol(0.1));
        rec.below(fmt::format("abs_2piC_128_minus_1_p={}", p), e.back(), cx.tol(1e-3));
    }
    rec.below("rho_split_relative_error", worst_split, cx.tol(1e-12));
    rec.below("trace_identity_relative_error", worst_trace, cx.tol(1e-10));
}

void c8_expansion(const Context& cx, Recorder& rec) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = MomentumGrid::make();
    const auto r = RadialPotential::round(g);
    for (double p : {2.0, 4.0}) {
        const auto m = ToyModel::weighted(1.0, p);
        const auto rep = expansion_check(r, m, {8, 16, 32, 64});
        rec.inside(fmt::format("residual_slope_p={}", p), rep.slope, -2.0 - cx.tol(0.3), -2.0 + cx.tol(0.3));
        // k * sup|(2pi) rho - f^{1-p}| must settle on A = sup|f^{-(p+1)} (W - c)| / 4
        const double c = c_top(r, m);
        double A = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i)
            A = std::max(A, std::abs(std::pow(m.f(r.mu(i)), -(p + 1)) * (toy_weighted_scal(r, m, i) - c)) / 4);
        bool shrinking = true;
        for (std::size_t i = 1; i < rep.k.size(); ++i)
            shrinking = shrinking && std::abs(rep.k[i] * rep.leading_sup[i] - A) < std::abs(rep.k[i - 1] * rep.leading_sup[i - 1] - A);
        rec.flag(fmt::format("k_times_leading_error_approaches_A_p={}", p), shrinking);
        rec.at_most(fmt::format("k64_times_leading_error_over_A_p={}", p),
                    64 * rep.leading_sup.back(), 1.1 * A + rep.residual_sup.back() * 64);
    }
    rec.flag("runtime_under_60s", seconds_since(t0) < 60.0);
}

void c9_balanced(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(9);
    const auto g = MomentumGrid::make();
    // generic start without a field, where the round metric is the balanced limit
    const auto m0 = ToyModel::unweighted(4.0);
    const auto start = RadialPotential::random(g, rng, 0.05);
    for (int k : {2, 4, 8, 16, 32}) {
        try {
            const auto res = balanced_iterate(start, k, m0, 500, 1e-10);
            rec.at_most(fmt::format("xi0_iterations_k={}", k), res.iterations, 500);
            rec.below(fmt::format("xi0_fixed_point_residual_k={}", k), balanced_residual(res.H, m0, g), cx.tol(1e-8));
        } catch (const Error& e) {
            rec.failed(fmt::format("xi0_iterations_k={}", k), e.what());
        }
    }
    // genuine field: b0 = 1, p = 4
    const auto m = ToyModel::weighted(1.0, 4.0);
    const auto r = RadialPotential::round(g);
    std::vector<double> dev;
    for (int k : {8, 16, 32, 64}) {
        rec.note(fmt::format("finite Futaki number F_{} = {:.6e}", k, finite_futaki(k, m, g)));
        try {
            const auto res = balanced_iterate(r, k, m, 500, 1e-10);
            const double c = c_top(r, m);
            double d = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) d = std::max(d, std::abs(toy_weighted_scal(*res.phi, m, i) - c));
            dev.push_back(d);
            rec.below(fmt::format("b0=1_fixed_point_residual_k={}", k), balanced_residual(res.H, m, g), cx.tol(1e-8));
        } catch (const Error& e) {
            dev.push_back(kNaN);
            rec.failed(fmt::format("b0=1_converged_k={}", k), e.what());
        }
    }
    bool trend = true;
    for (std::size_t i = 1; i < dev.size(); ++i) trend = trend && dev[i] <= 1.1 * dev[i - 1];
    rec.flag("b0=1_scal_deviation_non_increasing", trend);
}

void c10_z_theory(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(10);
    const auto g = MomentumGrid::make();
    const auto m = ToyModel::unweighted(4.0);
    const int k = 8;
    const auto Hb = hilb(RadialPotential::round(g), k, m);
    std::normal_distribution<double> n(0.0, 0.5);
    auto traceless = [&] {
        std::vector<double> A(k + 1);
        double mean = 0.0;
        for (auto& a : A) mean += (a = n(rng));
        for (auto& a : A) a -= mean / A.size();
        return A;
    };
    double worst_second = std::numeric_limits<double>::infinity(), worst_slope = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto A = traceless();
        std::vector<double> z;
        for (int t = -5; t <= 5; ++t) z.push_back(functional_Z(geodesic(Hb, A, 0.2 * t, m), m, g));
        for (std::size_t t = 1; t + 1 < z.size(); ++t) worst_second = std::min(worst_second, z[t - 1] - 2 * z[t] + z[t + 1]);
        worst_slope = std::max(worst_slope, std::abs(geodesic_slope(Hb, A, m, g)));
    }
    rec.at_least("min_second_difference_20_geodesics", worst_second, -cx.tol(1e-9));
    rec.below("max_abs_Z_slope_at_balanced", worst_slope, cx.tol(1e-9));
    const double zb = functional_Z(Hb, m, g);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        HermitianNorms H = Hb;
        for (auto& h : H.h) h *= std::exp(n(rng));
        margin = std::min(margin, functional_Z(H, m, g) - zb);
    }
    rec.at_least("min_Z_sample_minus_Z_balanced_100", margin, -cx.tol(1e-9));
    for (const auto& model : {ToyModel::unweighted(4.0), ToyModel::weighted(1.0, 4.0)}) {
        const auto phi = RadialPotential::random(g, rng);
        std::vector<double> d;
        for (int kk : {8, 16, 32, 64})
            d.push_back(std::abs(functional_L(phi, kk, model) - functional_Z(hilb(phi, kk, model), model, g)) / kk);
        bool dec = true;
        for (std::size_t i = 1; i < d.size(); ++i) dec = dec && d[i] < d[i - 1];
        rec.flag(fmt::format("L_minus_Z_decreasing_{}", model.has_field() ? "b0=1" : "xi0"), dec);
    }
}

void c11_quantized_mabuchi(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(11);
    const auto g = MomentumGrid::make();
    const auto m = ToyModel::weighted(1.0, 4.0);
    const auto r = RadialPotential::round(g);
    const std::vector<int> ks{8, 16, 32, 64};
    std::vector<double> kd(ks.begin(), ks.end());
    std::vector<double> Lr;
    for (int k : ks) Lr.push_back(functional_L(r, k, m));
    for (int i = 0; i < 5; ++i) {
        const auto phi = RadialPotential::random(g, rng);
        // lambda' = 1 / (2 pi) with the energy normalised as in toy_mabuchi
        const double M = toy_mabuchi(phi, m) / (2 * kPi);
        std::vector<double> err;
        for (std::size_t n = 0; n < ks.size(); ++n)
            err.push_back(std::abs(2.0 / ks[n] * (functional_L(phi, ks[n], m) - Lr[n]) - M));
        rec.at_most(fmt::format("error_slope_potential_{}", i + 1), loglog_slope(kd, err), -0.8);
    }
}

void c12_toy_minimum(const Context& cx, Recorder& rec) {
    auto rng = cx.rng(12);
    const auto g = MomentumGrid::make();
    const auto m = ToyModel::unweighted(4.0);
    const auto r = RadialPotential::round(g);
    const double m_round = toy_mabuchi(r, m);
    double margin = std::numeric_limits<double>::infinity();
    double eps64 = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto phi = RadialPotential::random(g, rng);
        margin = std::min(margin, toy_mabuchi(phi, m) - m_round);
        eps64 = std::max(eps64, almost_balanced_check(r, phi, m, {64}).eps_hat.back());
    }
    rec.at_least("min_M_minus_M_round_50", margin, 0.0);
    rec.below("max_eps_hat_k64", eps64, cx.tol(1e-3));
}

using Runner = void (*)(const Context&, Recorder&);

struct Entry {
    const char* tag;
    const char* title;
    Runner run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e{
        {"futaki", "Futaki curve", c1_futaki},
        {"ckem", "cKEM profile", c2_ckem_profile},
        {"kappa0", "kappa0 bracketing", c3_kappa0},
        {"euler-lagrange", "Euler-Lagrange consistency", c4_euler_lagrange},
        {"probe", "Unboundedness certificate", c5_probe},
        {"path", "Path-integral Mabuchi", c6_path},
        {"bergman", "Bergman identity", c7_bergman},
        {"expansion", "Expansion order", c8_expansion},
        {"balanced", "Balanced iteration", c9_balanced},
        {"z-theory", "Z functional", c10_z_theory},
        {"quantized-mabuchi", "Quantized Mabuchi", c11_quantized_mabuchi},
        {"toy-minimum", "Toy minimum", c12_toy_minimum},
        {"determinism", "Determinism", nullptr},
    };
    return e;
}

bool selected(const VerifyOptions& opt, int id, const std::string& tag) {
    return opt.select.empty() || opt.select.count(tag) > 0 || opt.select.count(std::to_string(id)) > 0;
}

CriterionResult run_one(const Context& cx, int id) {
    const auto& e = entries()[id - 1];
    CriterionResult r;
    r.id = id;
    r.tag = e.tag;
    r.title = e.title;
    Recorder rec(r);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        e.run(cx, rec);
    } catch (const Error& err) {
        rec.failed("completed", err.what());
    }
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

bool CriterionResult::pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& criterion_tags() {
    static const std::vector<std::string> tags = [] {
        std::vector<std::string> t;
        for (const auto& e : entries()) t.emplace_back(e.tag);
        return t;
    }();
    return tags;
}

std::vector<CriterionResult> run_suite(const VerifyOptions& opt) {
    if (!(opt.tolerance_scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance scale must be positive");
    for (const auto& s : opt.select) {
        const auto& tags = criterion_tags();
        const bool known = std::find(tags.begin(), tags.end(), s) != tags.end() ||
                           (s.find_first_not_of("0123456789") == std::string::npos && !s.empty() &&
                            std::stoi(s) >= 1 && std::stoi(s) <= static_cast<int>(tags.size()));
        if (!known) throw Error(ErrorCode::InvalidConfig, "unknown criterion '" + s + "'");
    }
    const Context cx{opt};
    const int n = static_cast<int>(entries().size());
    std::vector<CriterionResult> out;
    std::vector<int> ids;
    for (int id = 1; id < n; ++id)
        if (selected(opt, id, entries()[id - 1].tag)) ids.push_back(id);
    for (int id : ids) out.push_back(run_one(cx, id));

    if (opt.determinism && selected(opt, n, entries()[n - 1].tag)) {
        CriterionResult r;
        r.id = n;
        r.tag = entries()[n - 1].tag;
        r.title = entries()[n - 1].title;
        Recorder rec(r);
        const auto t0 = std::chrono::steady_clock::now();
        // rerun whatever else was selected, or all of 1-12 when only this one was asked for
        std::vector<int> again = ids;
        std::vector<CriterionResult> first = out;
        if (again.empty()) {
            for (int id = 1; id < n; ++id) again.push_back(id);
            first.clear();
            for (int id : again) first.push_back(run_one(cx, id));
        }
        std::vector<CriterionResult> second;
        for (int id : again) second.push_back(run_one(cx, id));
        const auto a = suite_csv(first), b = suite_csv(second);
        rec.flag("csv_bytes_identical", a == b);
        rec.note(fmt::format("{} bytes compared", a.size()));
        r.seconds = seconds_since(t0);
        out.push_back(std::move(r));
    }
    return out;
}

std::string suite_csv(const std::vector<CriterionResult>& results) {
    std::string s = "criterion,tag,check,value,rule,pass\n";
    for (const auto& r : results)
        for (const auto& c : r.checks)
            s += join_csv({std::to_string(r.id), r.tag, c.name, fmt_num(c.value), c.rule, c.pass ? "1" : "0"}) + "\n";
    return s;
}

std::string suite_summary(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        os << fmt::format("[{}] {:>2} {:<18} {:<28} ({:.2f} s)\n", r.pass() ? "PASS" : "FAIL", r.id, r.tag, r.title,
                          r.seconds);
        for (const auto& c : r.checks)
            if (!c.pass) os << fmt::format("       failed: {} = {} (rule {})\n", c.name, fmt_num(c.value), c.rule);
        if (!r.note.empty()) os << "       note: " << r.note << "\n";
    }
    return os.str();
}

}  // namespace kahler
