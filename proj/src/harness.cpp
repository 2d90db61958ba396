#include "mwhardy/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "mwhardy/acceptance.hpp"
#include "mwhardy/error.hpp"
#include "mwhardy/oracle.hpp"

namespace mwhardy {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw SchemaError(what); }

std::string normalized(std::string s) {
    for (auto& c : s) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) schema(where + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) schema(where + ": unknown field '" + k + "'");
}

double number(const json& obj, const char* key, double fallback, double lo, double hi, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) schema(where + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) schema(where + "." + key + ": out of range");
    return x;
}

int integer(const json& obj, const char* key, int fallback, int lo, int hi, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) schema(where + "." + key + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) schema(where + "." + key + ": out of range");
    return static_cast<int>(x);
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) schema(where + "." + key + ": expected a string");
    return obj.at(key).get<std::string>();
}

cplx complex_value(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    schema(where + ": expected a number or a [re, im] pair");
}

Point point_value(const json& obj, const char* key, int n, const std::string& where) {
    Point p{};
    if (!obj.contains(key)) return p;
    const auto& v = obj.at(key);
    if (v.is_number()) {
        p[0] = v.get<double>();
        return p;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != n) schema(where + "." + key + ": expected " + std::to_string(n) + " coordinates");
    for (int d = 0; d < n; ++d) {
        if (!v[d].is_number()) schema(where + "." + key + ": expected numbers");
        p[d] = v[d].get<double>();
    }
    return p;
}

HermitianMatrix matrix_value(const json& v, const std::string& where) {
    if (v.is_number()) {
        RVector d(1);
        d(0) = v.get<double>();
        return HermitianMatrix::diagonal(d);
    }
    if (!v.is_array() || v.empty()) schema(where + ": expected a number or a square array of rows");
    const auto m = static_cast<Eigen::Index>(v.size());
    CMatrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != m) schema(where + ": matrix is not square");
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = complex_value(v[i][j], where);
    }
    try {
        return HermitianMatrix(a);
    } catch (const InvariantError& e) {
        schema(where + ": " + e.what());
    }
}

ThetaProfile theta_value(const std::string& s, const std::string& where) {
    const auto t = normalized(s);
    if (t == "constant") return ThetaProfile::Constant;
    if (t == "linear") return ThetaProfile::Linear;
    if (t == "angular") return ThetaProfile::Angular;
    schema(where + ".theta: expected constant, linear or angular");
}

std::vector<Cell> cube_cells(const Cube& q) {
    std::vector<Cell> row{q.center[0]};
    if (q.n == 2) row.push_back(q.center[1]);
    row.push_back(q.edge);
    return row;
}

std::vector<std::string> cube_columns(int n) {
    if (n == 1) return {"cube_center", "cube_edge"};
    return {"cube_center_x", "cube_center_y", "cube_edge"};
}

std::vector<std::string> point_columns(int n) {
    if (n == 1) return {"x"};
    return {"x", "y"};
}

void append(std::vector<Cell>& row, std::vector<Cell> tail) { row.insert(row.end(), tail.begin(), tail.end()); }

Assertion check(std::string name, bool ok, std::string detail, json witness = nullptr) {
    return Assertion{std::move(name), ok, std::move(detail), std::move(witness)};
}

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

json cube_json(const Cube& q) {
    json c = {{"edge", q.edge}};
    c["center"] = q.n == 1 ? json(q.center[0]) : json::array({q.center[0], q.center[1]});
    return c;
}

// ---------------------------------------------------------------------------

struct Context {
    const RunConfig& cfg;
    Grid g;
    MatrixWeight weight;
    WeightSamples ws;
    std::vector<double> scales;
    TestFunction psi;

    explicit Context(const RunConfig& c)
        : cfg(c), g(c.grid), weight(weight_from_json(c.grid, c.weight)), ws(weight, c.p), scales(dyadic_scales(g)),
          psi(TestFunction::bump(g.n)) {}

    int m() const { return weight.m(); }
    VectorField function() const {
        const json spec = cfg.function.is_null() ? json{{"function", "bump"}} : cfg.function;
        return make_function(g, m(), function_from_json(spec, g.n, m()));
    }
    CubeFamily cubes() const {
        return grid_cube_family(g, cfg.min_edge > 0 ? cfg.min_edge : 4 * g.h, cfg.max_edge > 0 ? cfg.max_edge : g.L,
                                cfg.all_offsets);
    }
    SchwartzDictionary dictionary() const {
        return SchwartzDictionary::standard(g.n, cfg.N, static_cast<std::size_t>(cfg.dictionary_size));
    }
};

void characteristic(Context& cx, Report& r) {
    const auto fam = cx.cubes();
    if (fam.cubes.empty()) throw PreconditionError("cube family is empty");
    const auto ap = ap_characteristic(cx.ws, fam);
    const auto api = ap_infty_characteristic(cx.ws, fam);
    for (const auto* rep : {&ap, &api}) {
        Table t{rep == &ap ? "characteristic_ap" : "characteristic_ap_infty", cube_columns(cx.g.n), {}};
        t.columns.push_back("value");
        double lowest = kInfinity;
        for (const auto& cv : rep->per_cube) {
            auto row = cube_cells(cv.cube);
            row.push_back(cv.value);
            t.rows.push_back(std::move(row));
            lowest = std::min(lowest, cv.value);
        }
        r.tables.push_back(std::move(t));
        const std::string key = rep == &ap ? "ap" : "ap_infty";
        r.constants[key] = rep->value;
        r.constants[key + "_infinite"] = rep->infinite;
        r.assertions.push_back(check(key + " per-cube values >= 1", lowest >= 1.0 - 1e-9, fmt("smallest %.17g", lowest)));
    }
    r.constants["cube_family"] = fam.description;
    r.constants["cubes"] = fam.cubes.size();
    try {
        const auto dim = dimension_estimates(cx.ws, fam);
        r.constants["d_lower"] = dim.d_lower;
        r.constants["d_upper"] = dim.d_upper;
    } catch (const PreconditionError& e) {
        r.constants["dimension_estimates"] = std::string("unavailable: ") + e.what();
    }
}

void reduce(Context& cx, Report& r) {
    const auto fam = cx.cubes();
    Table t{"reduce", cube_columns(cx.g.n), {}};
    for (const char* c : {"strategy", "c_low", "c_high", "norm", "min_eigenvalue"}) t.columns.push_back(c);
    double worst_low = kInfinity, worst_high = 0.0;
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
        const auto ro = reducing_operator(cx.ws, fam.cubes[i], cx.cfg.strategy, cx.cfg.seed + i);
        auto row = cube_cells(fam.cubes[i]);
        append(row, {std::string(to_string(ro.strategy)), ro.c_low, ro.c_high, op_norm(ro.a.matrix()), min_eigenvalue(ro.a)});
        t.rows.push_back(std::move(row));
        worst_low = std::min(worst_low, ro.c_low);
        worst_high = std::max(worst_high, ro.c_high);
    }
    r.tables.push_back(std::move(t));
    r.constants["c_low"] = worst_low;
    r.constants["c_high"] = worst_high;
    r.assertions.push_back(check("reducing constants positive and finite",
                                 worst_low > 0.0 && worst_low <= worst_high && std::isfinite(worst_high),
                                 fmt("c_low %.6g, c_high %.6g", worst_low, worst_high)));
}

WeightMode mode_for(Context& cx, const std::string& mode, std::optional<ReducingFamily>& storage) {
    if (mode == "unweighted") return WeightMode::unweighted(cx.m());
    if (mode == "reducing") {
        storage.emplace(build_reducing_family(cx.ws, cx.scales, cx.cfg.strategy, cx.cfg.seed));
        return WeightMode::reducing(*storage);
    }
    return WeightMode::pointwise(cx.ws);
}

void maximal(Context& cx, Report& r) {
    const auto f = cx.function();
    std::optional<ReducingFamily> fam;
    const auto mode = mode_for(cx, cx.cfg.mode, fam);
    const auto stack = convolve_stack(f, cx.psi, cx.scales);
    const auto dict = cx.dictionary();
    const std::vector<std::pair<std::string, ScalarField>> fields{
        {"radial", radial_maximal(stack, mode)},
        {"nontangential", nontangential_maximal(stack, mode, cx.cfg.a)},
        {"infimum", nontangential_infimum_maximal(stack, mode, cx.cfg.a, cx.cfg.b)},
        {"peetre", peetre_maximal(stack, mode, cx.cfg.l)},
        {"grand_radial", grand_maximal(f, dict, GrandVariant::Radial, 0.0, mode)},
        {"grand_nontangential", grand_maximal(f, dict, GrandVariant::Nontangential, cx.cfg.a, mode)},
        {"grand_peetre", grand_maximal(f, dict, GrandVariant::Peetre, cx.cfg.l, mode)}};
    Table t{"maximal", point_columns(cx.g.n), {}};
    t.columns.push_back("f_norm");
    for (const auto& [name, field] : fields) {
        t.columns.push_back(name);
        r.constants["lp_" + name] = lp_quasinorm(field, cx.cfg.p);
    }
    for (std::size_t x = 0; x < cx.g.size(); ++x) {
        const auto pt = cx.g.point(x);
        std::vector<Cell> row{pt[0]};
        if (cx.g.n == 2) row.push_back(pt[1]);
        row.push_back(f.at(x).norm());
        for (const auto& [name, field] : fields) row.push_back(field.values[x]);
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    r.constants["mode"] = mode.name();
    r.constants["hardy_quasinorm"] = hardy_quasinorm(f, cx.psi, cx.ws);
    r.constants["weighted_lp_norm"] = weighted_lp_norm(f, cx.ws);
    const MaximalConfig mc{cx.cfg.a, cx.cfg.b, cx.cfg.l, cx.cfg.N, static_cast<std::size_t>(cx.cfg.dictionary_size)};
    const auto chain = chain_check(f, cx.psi, mc, mode);
    json witness = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(chain.violations.size(), 20); ++i) {
        const auto& v = chain.violations[i];
        witness.push_back({{"inequality", v.inequality}, {"sample", v.sample}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    }
    r.assertions.push_back(check("pointwise maximal chain", chain.ok(),
                                 fmt("%zu violations over %zu comparisons", chain.violations.size(), chain.comparisons),
                                 witness));
}

std::vector<double> czd_alphas(const RunConfig& cfg, double proxy_max) {
    if (cfg.alpha) return {*cfg.alpha};
    if (cfg.alpha_fraction) return {*cfg.alpha_fraction * proxy_max};
    std::vector<double> out;
    for (int j = cfg.levels[0]; j <= cfg.levels[1]; ++j) out.push_back(std::ldexp(proxy_max, j));
    return out;
}

void czd(Context& cx, Report& r) {
    const auto f = cx.function();
    const auto fam = build_reducing_family(cx.ws, cx.scales, cx.cfg.strategy, cx.cfg.seed);
    const auto proxy = grand_proxy(f, cx.dictionary(), WeightMode::reducing(fam));
    CZOptions opt;
    opt.s = cx.cfg.s;
    opt.N = cx.cfg.N;
    opt.dictionary_size = cx.cfg.dictionary_size;
    opt.strategy = cx.cfg.strategy;
    Table cubes{"czd_cubes", {"alpha", "k"}, {}};
    for (const auto& c : cube_columns(cx.g.n)) cubes.columns.push_back(c == "cube_edge" ? "edge" : (c == "cube_center" ? "center" : c.substr(5)));
    for (const char* c : {"moment_residual_max", "good_bound", "bad_energy_ratio"}) cubes.columns.push_back(c);
    Table levels{"czd_levels",
                 {"alpha", "cubes", "reconstruction_residual", "moment_residual", "good_constant", "bad_energy_max",
                  "domain_truncated", "hypothesis_met"},
                 {}};
    double recon = 0.0, moments = 0.0;
    std::vector<double> alphas = czd_alphas(cx.cfg, proxy.max());
    std::sort(alphas.begin(), alphas.end());
    std::vector<std::uint8_t> prev;
    bool monotone = true;
    json witness = json::array();
    for (double alpha : alphas) {
        const auto d = cz_decompose(f, cx.ws, proxy, alpha, opt);
        for (std::size_t k = 0; k < d.cubes.size(); ++k) {
            const auto& c = d.cubes[k];
            std::vector<Cell> row{alpha, static_cast<std::int64_t>(k)};
            append(row, cube_cells(c.cube));
            append(row, {c.moment_residual, c.good_bound, c.bad_energy_ratio});
            cubes.rows.push_back(std::move(row));
        }
        levels.rows.push_back({alpha, static_cast<std::int64_t>(d.cubes.size()), d.reconstruction_residual, d.moment_residual,
                               d.good_constant, d.bad_energy_max, static_cast<std::int64_t>(d.domain_truncated),
                               static_cast<std::int64_t>(d.hypothesis_met)});
        recon = std::max(recon, d.reconstruction_residual);
        moments = std::max(moments, d.moment_residual);
        if (!prev.empty())
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (d.level.mask[i] > prev[i]) {
                    monotone = false;
                    if (witness.size() < 20) witness.push_back({{"alpha", alpha}, {"sample", i}});
                }
        prev = d.level.mask;
    }
    r.tables.push_back(std::move(levels));
    r.tables.push_back(std::move(cubes));
    r.constants["proxy_max"] = proxy.max();
    r.assertions.push_back(check("reconstruction f = g + sum b_k", recon < 1e-8, fmt("max residual %.3e", recon)));
    r.assertions.push_back(check("vanishing moments of b_k", moments < 1e-6, fmt("max residual %.3e", moments)));
    r.assertions.push_back(check("level sets shrink as alpha grows", monotone, monotone ? "" : "mask grew", witness));
}

void atoms(Context& cx, Report& r) {
    const auto f = cx.function();
    const auto fam = build_reducing_family(cx.ws, cx.scales, cx.cfg.strategy, cx.cfg.seed);
    AtomicOptions opt;
    opt.s = cx.cfg.s;
    opt.levels = cx.cfg.atom_levels;
    opt.q = cx.cfg.q;
    opt.N = cx.cfg.N;
    opt.dictionary_size = cx.cfg.dictionary_size;
    opt.strategy = cx.cfg.strategy;
    const auto d = atomic_decompose(f, cx.ws, fam, opt);

    Table t{"atoms", {"j", "k", "lambda", "moment_residual", "validation_margin"}, {}};
    json archive = json::array();
    std::string payload;
    auto put = [&](const Atom& a, double lambda, int j, std::int64_t k) {
        archive.push_back({{"j", j}, {"k", k}, {"cube", cube_json(a.cube)}, {"p", a.p},
                           {"q", std::isinf(a.q) ? json("inf") : json(a.q)}, {"s", a.s}, {"flavor", to_string(a.flavor)},
                           {"coefficient", lambda}, {"offset", payload.size()}, {"samples", a.field.samples.size()}});
        for (std::size_t i = 0; i < a.field.samples.size(); ++i) {
            const auto idx = static_cast<std::uint64_t>(a.field.samples[i]);
            payload.append(reinterpret_cast<const char*>(&idx), sizeof idx);
            for (int c = 0; c < a.field.m; ++c) {
                const cplx v = a.field.values[i * a.field.m + c];
                const double re = v.real(), im = v.imag();
                payload.append(reinterpret_cast<const char*>(&re), sizeof re);
                payload.append(reinterpret_cast<const char*>(&im), sizeof im);
            }
        }
    };
    for (const auto& la : d.atoms) {
        t.rows.push_back({static_cast<std::int64_t>(la.j), static_cast<std::int64_t>(la.k), la.lambda, la.moment_residual,
                          la.atom.validation.margin});
        put(la.atom, la.lambda, la.j, static_cast<std::int64_t>(la.k));
    }
    if (d.tail) put(*d.tail, d.tail_lambda, 1, -1);
    r.tables.push_back(std::move(t));
    r.files.emplace_back("atoms.json", json{{"m", d.m}, {"grid", {{"n", cx.g.n}, {"L", cx.g.L}, {"h", cx.g.h}}},
                                            {"payload", "atoms.bin"},
                                            {"record", "uint64 sample index, then m (re, im) float64 pairs"},
                                            {"atoms", archive}}
                                           .dump(2) + "\n");
    r.files.emplace_back("atoms.bin", payload);

    const auto profiles = pairing_profiles(cx.g.n);
    const auto with_tail = reconstruct(d, f, profiles, true);
    const auto ladder = reconstruct(d, f, profiles, false);
    Table pairing{"atoms_pairing", {"window", "residual", "residual_without_tail"}, {}};
    for (std::size_t w = 0; w < with_tail.worst.size(); ++w)
        pairing.rows.push_back({static_cast<std::int64_t>(w + 1), with_tail.worst[w], ladder.worst[w]});
    r.tables.push_back(std::move(pairing));

    r.constants["alpha0"] = d.alpha0;
    r.constants["levels_used"] = d.levels_used;
    r.constants["ladder_cut"] = d.ladder_cut;
    r.constants["c"] = d.c;
    r.constants["coefficient_sum"] = d.coefficient_sum;
    r.constants["hardy_proxy"] = d.hardy_proxy;
    r.constants["ratio"] = d.ratio();
    r.constants["coefficient_norm"] = d.coefficient_norm();
    r.constants["tail_lambda"] = d.tail_lambda;
    r.constants["tail_is_atom"] = d.tail_is_atom;
    r.constants["identity_residual"] = d.identity_residual;
    r.constants["tail_residual"] = d.tail_residual;
    const double widest = with_tail.worst.empty() ? 0.0 : with_tail.worst.back();
    r.assertions.push_back(check("every ladder atom validates", d.all_valid, ""));
    r.assertions.push_back(check("pairing reconstruction at the widest window", widest < 1e-2, fmt("residual %.3e", widest)));
}

void czo(Context& cx, Report& r) {
    const auto k = kernel_from_json(cx.cfg.kernel, cx.g.n);
    const auto kv = kernel_validate(k, 2000, cx.cfg.seed);
    r.constants["kernel"] = k.name();
    r.constants["c_k"] = kv.c_k;
    r.constants["kernel_finite"] = kv.finite;
    r.constants["size_constants"] = kv.size_constant;
    r.constants["regularity_constants"] = kv.regularity_constant;
    r.constants["kernel_failures"] = kv.failures;
    r.assertions.push_back(check("kernel conditions finite", kv.finite, fmt("C_K %.6g", kv.c_k), kv.failures));

    const double lo = cx.cfg.min_edge > 0 ? cx.cfg.min_edge : 0.25;
    const double hi = cx.cfg.max_edge > 0 ? cx.cfg.max_edge : std::min(1.0, cx.g.L);
    std::vector<Atom> family;
    for (int i = 0; i < cx.cfg.atoms; ++i)
        family.push_back(random_atom(cx.ws, cx.cfg.s, AtomFlavor::A, cx.cfg.seed + static_cast<std::uint64_t>(i), lo, hi));

    const auto mc = vanishing_moment_check(k, family, cx.g, cx.cfg.s, kv.c_k);
    Table moments{"czo_moments", {"atom", "gamma_1", "gamma_2", "domain_limit", "far_field", "tail_estimate", "residual"}, {}};
    for (const auto& e : mc.entries)
        moments.rows.push_back({static_cast<std::int64_t>(e.atom), static_cast<std::int64_t>(e.gamma[0]),
                                static_cast<std::int64_t>(e.gamma[1]), e.domain_limit, e.far_field, e.tail_estimate,
                                e.residual});
    r.tables.push_back(std::move(moments));
    r.assertions.push_back(check("T* annihilates polynomials of degree <= s", mc.ok(), fmt("worst residual %.3e", mc.worst)));

    BoundednessOptions bo;
    bo.eta = cx.cfg.eta;
    const auto rep = boundedness_harness(k, family, cx.ws, cx.psi, bo);
    Table t{"czo_atoms", {"atom"}, {}};
    for (const auto& c : cube_columns(cx.g.n)) t.columns.push_back(c);
    for (const char* c : {"lp_bound", "hardy_bound", "near", "tail_fraction", "decay_rate", "hypothesis_met"})
        t.columns.push_back(c);
    for (std::size_t i = 0; i < rep.per_atom.size(); ++i) {
        const auto& b = rep.per_atom[i];
        std::vector<Cell> row{static_cast<std::int64_t>(i)};
        append(row, cube_cells(family[i].cube));
        append(row, {b.lp_bound, b.hardy_bound, b.near, b.tail_fraction, b.decay_rate,
                     static_cast<std::int64_t>(b.hypothesis_met)});
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    r.tables.push_back(Table{"czo_family", {"atoms", "max_lp", "max_hardy"},
                             {{static_cast<std::int64_t>(family.size()), rep.max_lp, rep.max_hardy}}});
    r.constants["max_lp"] = rep.max_lp;
    r.constants["max_hardy"] = rep.max_hardy;
    r.assertions.push_back(check("family maxima finite", rep.finite(), fmt("L^p %.6g, H^p %.6g", rep.max_lp, rep.max_hardy)));
}

void oracle_tables(Context& cx, Report& r) {
    oracle::Config oc;
    oc.p = cx.cfg.p;
    oc.a = cx.cfg.a;
    oc.b = cx.cfg.b;
    oc.l = cx.cfg.l;
    oc.N = cx.cfg.N;
    if (cx.cfg.min_edge > 0) oc.min_edge = cx.cfg.min_edge;
    if (cx.cfg.max_edge > 0) oc.max_edge = cx.cfg.max_edge;
    const auto rows = oracle::compare(cx.weight, cx.function(), oc);
    Table t{"oracle", {"quantity", "toolkit", "oracle", "difference", "ok"}, {}};
    json witness = json::array();
    double worst = 0.0;
    for (const auto& c : rows) {
        t.rows.push_back({c.quantity, c.toolkit, c.oracle, c.difference, static_cast<std::int64_t>(c.ok)});
        worst = std::max(worst, c.difference);
        if (!c.ok) witness.push_back({{"quantity", c.quantity}, {"toolkit", c.toolkit}, {"oracle", c.oracle}});
    }
    r.tables.push_back(std::move(t));
    r.constants["oracle_worst_difference"] = worst;
    r.assertions.push_back(check("scalar oracle agreement", witness.empty(),
                                 fmt("%zu quantities, largest relative difference %.3e", rows.size(), worst), witness));
}

void verify(Context& cx, Report& r) {
    // each stage contributes its assertions; tables are kept for the record
    characteristic(cx, r);
    reduce(cx, r);
    for (const char* mode : {"pointwise", "reducing"}) {
        RunConfig c = cx.cfg;
        c.mode = mode;
        Context sub(c);
        Report part;
        maximal(sub, part);
        for (auto& a : part.assertions) {
            a.name += std::string(" (") + mode + ")";
            r.assertions.push_back(std::move(a));
        }
    }
    {
        RunConfig c = cx.cfg;
        if (!c.alpha && !c.alpha_fraction) c.levels = {-3, -1};
        Context sub(c);
        czd(sub, r);
    }
    atoms(cx, r);
    {
        RunConfig c = cx.cfg;
        c.atoms = std::min(c.atoms, 4);
        if (c.kernel.is_string() && c.kernel.get<std::string>() == "hilbert" && cx.g.n == 2) c.kernel = "riesz2d";
        Context sub(c);
        czo(sub, r);
    }
    if (cx.m() == 1) oracle_tables(cx, r);
    if (cx.cfg.acceptance) {
        Table t{"acceptance", {"criterion", "title", "passed"}, {}};
        json details = json::array();
        for (const auto& c : run_acceptance()) {
            t.rows.push_back({static_cast<std::int64_t>(c.id), c.title, static_cast<std::int64_t>(c.passed)});
            details.push_back({{"criterion", c.id}, {"detail", c.detail}, {"seconds", c.seconds}});
            r.assertions.push_back(check("acceptance " + std::to_string(c.id) + ": " + c.title, c.passed, c.detail));
        }
        r.tables.push_back(std::move(t));
        r.constants["acceptance"] = details;
    }
}

} // namespace

// ---------------------------------------------------------------------------

MatrixWeight weight_from_json(const Grid& g, const json& spec) {
    const std::string where = "weight";
    if (!spec.is_object()) schema("weight: expected an object");
    const auto family = normalized(text(spec, "family", "", where));
    try {
        if (family == "identity") {
            allow_keys(spec, where, {"family", "m", "n", "L", "h"});
            return MatrixWeight::identity(g, integer(spec, "m", 1, 1, 4, where));
        }
        if (family == "constant") {
            allow_keys(spec, where, {"family", "value", "n", "L", "h"});
            if (!spec.contains("value")) schema("weight.value: required");
            return MatrixWeight::constant(g, matrix_value(spec.at("value"), where + ".value"));
        }
        if (family == "scalar-power") {
            allow_keys(spec, where, {"family", "alpha", "n", "L", "h"});
            return MatrixWeight::scalar_power(g, number(spec, "alpha", 0.5, -10.0, 10.0, where));
        }
        if (family == "rotating-2x2" || family == "rotating") {
            allow_keys(spec, where, {"family", "alpha1", "alpha2", "theta", "theta0", "n", "L", "h"});
            return MatrixWeight::rotating(g, number(spec, "alpha1", 0.0, -10.0, 10.0, where),
                                          number(spec, "alpha2", 0.0, -10.0, 10.0, where),
                                          theta_value(text(spec, "theta", "linear", where), where),
                                          number(spec, "theta0", 0.0, -1e3, 1e3, where));
        }
        if (family == "step") {
            allow_keys(spec, where, {"family", "center", "edge", "inside", "outside", "n", "L", "h"});
            if (!spec.contains("inside") || !spec.contains("outside")) schema("weight: step needs inside and outside");
            const Cube box{g.n, point_value(spec, "center", g.n, where), number(spec, "edge", 1.0, 0.0, 1e6, where)};
            return MatrixWeight::step(g, box, matrix_value(spec.at("inside"), where + ".inside"),
                                      matrix_value(spec.at("outside"), where + ".outside"));
        }
        if (family == "affine") {
            allow_keys(spec, where, {"family", "a0", "slopes", "n", "L", "h"});
            if (!spec.contains("a0")) schema("weight.a0: required");
            std::vector<HermitianMatrix> slopes;
            if (spec.contains("slopes")) {
                if (!spec.at("slopes").is_array() || static_cast<int>(spec.at("slopes").size()) != g.n)
                    schema("weight.slopes: expected one matrix per coordinate");
                for (const auto& s : spec.at("slopes")) slopes.push_back(matrix_value(s, where + ".slopes"));
            }
            return MatrixWeight::affine(g, matrix_value(spec.at("a0"), where + ".a0"), slopes);
        }
        if (family == "user-grid") {
            allow_keys(spec, where, {"family", "values", "n", "L", "h"});
            const auto& v = spec.contains("values") ? spec.at("values") : json();
            if (!v.is_array() || v.size() != g.size())
                schema("weight.values: expected one matrix per grid sample (" + std::to_string(g.size()) + ")");
            MatrixField field;
            field.m = matrix_value(v[0], where + ".values").dim();
            for (const auto& e : v) {
                const auto a = matrix_value(e, where + ".values");
                if (a.dim() != field.m) schema("weight.values: matrices differ in size");
                field.data.insert(field.data.end(), a.matrix().data(), a.matrix().data() + field.m * field.m);
            }
            return MatrixWeight::user_grid(g, field);
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const InvariantError& e) {
        schema(where + ": " + e.what());
    }
    schema("weight.family: unknown family '" + family + "'");
}

FunctionSpec function_from_json(const json& spec, int n, int m) {
    const std::string where = "function";
    allow_keys(spec, where, {"function", "center", "width", "radius", "height", "components"});
    const auto name = normalized(text(spec, "function", "bump", where));
    FunctionSpec f;
    using P = FunctionSpec::Profile;
    if (name == "zero") f.profile = P::Zero;
    else if (name == "bump") f.profile = P::Bump;
    else if (name == "mean-zero-bump" || name == "hat") f.profile = P::Hat;
    else if (name == "gaussian") f.profile = P::Gaussian;
    else if (name == "indicator") f.profile = P::Indicator;
    else if (name == "haar") f.profile = P::Haar;
    else schema("function.function: unknown profile '" + name + "'");
    f.center = point_value(spec, "center", n, where);
    if (spec.contains("width") && spec.contains("radius")) schema("function: give width or radius, not both");
    f.radius = number(spec, spec.contains("width") ? "width" : "radius", 0.25, 1e-12, 1e6, where);
    f.height = number(spec, "height", 1.0, -1e12, 1e12, where);
    if (spec.contains("components")) {
        const auto& c = spec.at("components");
        if (!c.is_array() || static_cast<int>(c.size()) != m)
            schema("function.components: expected " + std::to_string(m) + " entries");
        for (const auto& v : c) f.vector.push_back(complex_value(v, where + ".components"));
    }
    return f;
}

Kernel kernel_from_json(const json& spec, int n) {
    const std::string where = "kernel";
    if (spec.is_string()) {
        const auto name = normalized(spec.get<std::string>());
        if (name == "hilbert") {
            if (n != 1) schema("kernel: hilbert needs n = 1");
            return Kernel::hilbert();
        }
        if (name == "riesz2d") {
            if (n != 2) schema("kernel: riesz2d needs n = 2");
            return Kernel::riesz2d();
        }
        schema("kernel: expected hilbert, riesz2d or a rational template object");
    }
    allow_keys(spec, where, {"template", "name", "terms", "radial_power", "order", "delta"});
    if (normalized(text(spec, "template", "rational", where)) != "rational") schema("kernel.template: only 'rational' is known");
    if (!spec.contains("terms") || !spec.at("terms").is_array() || spec.at("terms").empty())
        schema("kernel.terms: expected a non-empty array");
    std::vector<KernelTerm> terms;
    for (const auto& t : spec.at("terms")) {
        allow_keys(t, "kernel.terms[]", {"coef", "powers"});
        KernelTerm term;
        term.coef = number(t, "coef", 0.0, -1e12, 1e12, "kernel.terms[]");
        if (t.contains("powers")) {
            const auto& p = t.at("powers");
            if (!p.is_array() || static_cast<int>(p.size()) != n) schema("kernel.terms[].powers: expected n exponents");
            for (int d = 0; d < n; ++d) {
                if (!p[d].is_number_integer() || p[d].get<int>() < 0) schema("kernel.terms[].powers: expected naturals");
                term.powers[d] = p[d].get<int>();
            }
        }
        terms.push_back(term);
    }
    try {
        return Kernel::rational(n, text(spec, "name", "user", where), terms, number(spec, "radial_power", n, 0.0, 64.0, where),
                                integer(spec, "order", 2, 0, 4, where), number(spec, "delta", 1.0, 1e-6, 1.0, where));
    } catch (const PreconditionError& e) {
        schema(std::string("kernel: ") + e.what());
    }
}

RunConfig parse_config(const json& doc, const std::string& command) {
    static const std::set<std::string> commands{"characteristic", "reduce", "maximal", "czd", "atoms", "czo", "verify", "oracle"};
    if (!commands.count(command)) schema("unknown command '" + command + "'");
    allow_keys(doc, "config",
               {"schema", "grid", "weight", "function", "p", "q", "s", "a", "b", "l", "N", "dictionary_size", "alpha",
                "alpha_fraction", "levels", "atom_levels", "eta", "kernel", "atoms", "cube_family", "mode", "strategy",
                "acceptance", "seed"});
    if (!doc.contains("schema") || !doc.at("schema").is_number_integer() || doc.at("schema").get<int>() != kSchemaVersion)
        schema("config.schema: expected " + std::to_string(kSchemaVersion));
    if (!doc.contains("weight")) schema("config.weight: required");
    RunConfig c;
    c.command = command;
    c.weight = doc.at("weight");
    if (!c.weight.is_object()) schema("weight: expected an object");

    const json& gsrc = doc.contains("grid") ? doc.at("grid") : c.weight;
    if (doc.contains("grid")) allow_keys(gsrc, "grid", {"n", "L", "h"});
    const int n = integer(gsrc, "n", 1, 1, 2, "grid");
    const double L = number(gsrc, "L", 4.0, 1e-6, 1e6, "grid");
    const double h = number(gsrc, "h", 1.0 / 64, 1e-9, L, "grid");
    try {
        c.grid = Grid::make(n, L, h);
    } catch (const Error& e) {
        schema(std::string("grid: ") + e.what());
    }
    if (c.grid.size() > (n == 1 ? 1u << 20 : 1u << 18)) schema("grid: too many samples");

    if (doc.contains("function")) c.function = doc.at("function");
    c.p = number(doc, "p", 1.0, 1e-3, 1e3, "config");
    if (doc.contains("q")) {
        const auto& q = doc.at("q");
        if (q.is_string() && normalized(q.get<std::string>()) == "inf") c.q = kInfinity;
        else c.q = number(doc, "q", 0.0, 1.0 + 1e-12, 1e12, "config");
    }
    c.s = integer(doc, "s", 0, 0, 3, "config");
    c.a = number(doc, "a", 1.0, 1e-6, 1e3, "config");
    c.b = number(doc, "b", 0.25, 1e-6, 1.0, "config");
    c.l = number(doc, "l", 2.0, 0.0, 1e3, "config");
    c.N = integer(doc, "N", 1, 0, 8, "config");
    c.dictionary_size = integer(doc, "dictionary_size", 12, 1, 64, "config");
    if (doc.contains("alpha")) c.alpha = number(doc, "alpha", 0.0, 1e-300, 1e300, "config");
    if (doc.contains("alpha_fraction")) c.alpha_fraction = number(doc, "alpha_fraction", 0.5, 1e-12, 1.0, "config");
    if (c.alpha && c.alpha_fraction) schema("config: give alpha or alpha_fraction, not both");
    if (doc.contains("levels")) {
        const auto& lv = doc.at("levels");
        if (!lv.is_array() || lv.size() != 2 || !lv[0].is_number_integer() || !lv[1].is_number_integer() ||
            lv[0].get<int>() > lv[1].get<int>() || lv[1].get<int>() > 0 || lv[0].get<int>() < -40)
            schema("config.levels: expected [j_lo, j_hi] with -40 <= j_lo <= j_hi <= 0");
        c.levels = {lv[0].get<int>(), lv[1].get<int>()};
    }
    c.atom_levels = integer(doc, "atom_levels", 16, 1, 40, "config");
    c.eta = number(doc, "eta", 0.0, 0.0, 1e6, "config");
    if (c.eta > 0.0 && c.eta < 4 * c.grid.h * (1 - 1e-12)) schema("config.eta: needs eta >= 4h");
    if (doc.contains("kernel")) c.kernel = doc.at("kernel");
    if (!c.kernel.is_string() && !c.kernel.is_object()) schema("config.kernel: expected a name or a template object");
    c.atoms = integer(doc, "atoms", 20, 1, 10000, "config");
    if (doc.contains("cube_family")) {
        const auto& cf = doc.at("cube_family");
        allow_keys(cf, "cube_family", {"min_edge", "max_edge", "all_offsets"});
        c.min_edge = number(cf, "min_edge", 0.0, 0.0, 2 * L, "cube_family");
        c.max_edge = number(cf, "max_edge", 0.0, 0.0, 2 * L, "cube_family");
        if (cf.contains("all_offsets")) {
            if (!cf.at("all_offsets").is_boolean()) schema("cube_family.all_offsets: expected a boolean");
            c.all_offsets = cf.at("all_offsets").get<bool>();
        }
        if (c.max_edge > 0 && c.min_edge > c.max_edge) schema("cube_family: min_edge exceeds max_edge");
    }
    c.mode = normalized(text(doc, "mode", "pointwise", "config"));
    if (c.mode != "pointwise" && c.mode != "reducing" && c.mode != "unweighted")
        schema("config.mode: expected pointwise, reducing or unweighted");
    try {
        c.strategy = reducing_strategy_from_string(text(doc, "strategy", "auto", "config"));
    } catch (const Error& e) {
        schema(std::string("config.strategy: ") + e.what());
    }
    if (doc.contains("acceptance")) {
        if (!doc.at("acceptance").is_boolean()) schema("config.acceptance: expected a boolean");
        c.acceptance = doc.at("acceptance").get<bool>();
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) schema("config.seed: expected a non-negative integer");
        c.seed = doc.at("seed").get<std::uint64_t>();
    }
    // the infimum maximal function needs bt/h integral at the finest scale
    const auto scales = dyadic_scales(c.grid);
    if (!scales.empty()) {
        const double cells = c.b * scales.front() / c.grid.h;
        if (std::abs(cells - std::round(cells)) > 1e-9 || cells < 0.5) schema("config.b: b t / h must be a positive integer");
    }
    // the weight and function documents are validated eagerly
    weight_from_json(c.grid, c.weight);
    if (!c.function.is_null()) function_from_json(c.function, n, weight_from_json(c.grid, c.weight).m());
    if (command == "czo") kernel_from_json(c.kernel, n);
    return c;
}

bool Report::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

Report run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Report r;
    r.command = config.command;
    r.seed = config.seed;
    Context cx(config);
    cx.weight.validate();
    if (config.command == "characteristic") characteristic(cx, r);
    else if (config.command == "reduce") reduce(cx, r);
    else if (config.command == "maximal") maximal(cx, r);
    else if (config.command == "czd") czd(cx, r);
    else if (config.command == "atoms") atoms(cx, r);
    else if (config.command == "czo") czo(cx, r);
    else if (config.command == "verify") verify(cx, r);
    else if (config.command == "oracle") oracle_tables(cx, r);
    else throw SchemaError("unknown command '" + config.command + "'");
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Report oracle_scalar(const RunConfig& config) {
    RunConfig c = config;
    c.command = "oracle";
    return run(c);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // guard against a non-C numeric locale
    for (char* p = buf; *p; ++p)
        if (*p == ',') *p = '.';
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + quote(t.columns[i]);
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* d = std::get_if<double>(&row[i])) out += format_number(*d);
            else if (const auto* k = std::get_if<std::int64_t>(&row[i])) out += std::to_string(*k);
            else out += quote(std::get<std::string>(row[i]));
        }
        out += '\n';
    }
    return out;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& bytes) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw PreconditionError("cannot write " + (dir / name).string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    json summary;
    summary["schema"] = kSchemaVersion;
    summary["command"] = report.command;
    summary["seed"] = report.seed;
    summary["config"] = report.config;
    summary["constants"] = report.constants;
    summary["passed"] = report.passed();
    summary["wall_clock_seconds"] = report.seconds;
    summary["tables"] = json::array();
    summary["assertions"] = json::array();
    for (const auto& t : report.tables) {
        write(t.name + ".csv", to_csv(t));
        summary["tables"].push_back(t.name + ".csv");
    }
    json witness = json::array();
    for (const auto& a : report.assertions) {
        summary["assertions"].push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
        if (!a.passed) witness.push_back({{"name", a.name}, {"detail", a.detail}, {"witness", a.witness}});
    }
    for (const auto& [name, bytes] : report.files) write(name, bytes);
    write("summary.json", summary.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
    if (!witness.empty()) write("witness.json", witness.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
    else std::filesystem::remove(dir / "witness.json");
}

} // namespace mwhardy
