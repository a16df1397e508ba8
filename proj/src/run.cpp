#include "obstrukt/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <thread>

#include "obstrukt/cobord.hpp"
#include "obstrukt/error.hpp"
#include "obstrukt/linking.hpp"
#include "obstrukt/obstruction.hpp"
#include "obstrukt/textio.hpp"

namespace obstrukt {

namespace {

std::string labels_1based(const LabelOrdering& l) {
    return "(" + std::to_string(l[0] + 1) + " " + std::to_string(l[1] + 1) + " " + std::to_string(l[2] + 1) + ")";
}

std::string describe_zero(const ZeroCertificate& z) {
    const auto& p = z.location;
    std::string out = "zero labels " + labels_1based(p.labels);
    if (!p.s.empty()) out += " s=" + fmt_vector(p.s);
    out += " a12=" + fmt(p.a12) + " a31=" + fmt(p.a31) + " residual=" + fmt(z.residual) +
           " rank=" + std::to_string(z.jacobian_rank) + " min_pivot=" + fmt(z.min_pivot) +
           " transversal=" + (z.transversal ? "yes" : "no");
    return out;
}

TripleSearchOptions search_options(const RunSpec& spec) {
    TripleSearchOptions o;
    if (spec.tol_residual) o.res_tol = *spec.tol_residual;
    if (spec.tol_pivot) o.rel_pivot_tol = *spec.tol_pivot;
    if (spec.grid) o.grid = *spec.grid;
    if (spec.a_min) o.a_min = *spec.a_min;
    if (spec.a_max) o.a_max = *spec.a_max;
    o.threads = spec.threads;
    return o;
}

void echo_search_tolerances(Report& r, const TripleSearchOptions& o) {
    r.tolerances = {{"residual", fmt(o.res_tol)},     {"relative-pivot", fmt(o.rel_pivot_tol)},
                    {"grid", std::to_string(o.grid)}, {"a-min", fmt(o.a_min)},
                    {"a-max", fmt(o.a_max)},         {"seed", fmt(o.seed_tol)},
                    {"dedup", fmt(o.dedup_radius)}};
}

// Search diagnostics shared by the triple-point commands.
void add_search_checks(Report& r, const ObstructionReport& rep) {
    const auto& s = rep.search;
    r.results.push_back({"candidates", std::to_string(s.candidates)});
    r.results.push_back({"zeros", std::to_string(s.zeros.size())});
    r.results.push_back({"out-of-domain-limits", std::to_string(s.out_of_domain)});
    for (const auto& z : s.zeros) r.certificates.push_back(describe_zero(z));
    for (const auto& sz : s.suspects) {
        r.certificates.push_back("suspect labels " + labels_1based(sz.location.labels) + " grid_residual=" +
                                 fmt(sz.grid_residual) + " reason=" + sz.reason);
    }
    r.add_check("no-suspect-zeros", "every near-zero grid node refines to a certified zero",
                s.suspects.empty() ? CheckStatus::Pass : CheckStatus::Suspect,
                std::to_string(s.suspects.size()) + " suspect(s)");
    r.add_check("compact-zero-set", "no zero within two grid pitches of the weight box boundary",
                s.boundary_hit ? CheckStatus::Suspect : CheckStatus::Pass,
                s.boundary_hit ? "a zero approaches the a-box boundary; widen --a-min/--a-max" : "interior");
    if (rep.consistency_error) {
        r.add_check("relabeling-closure", "the zero set is closed under relabeling of the three points", false,
                    *rep.consistency_error);
        return;
    }
    r.add_check("relabeling-closure", "the zero set is closed under relabeling of the three points", true,
                std::to_string(rep.orbits.sigma2_orbits.size()) + " swap orbit(s), " +
                    std::to_string(rep.orbits.sigma3_orbits.size()) + " relabeling orbit(s)");
    const bool all_transversal =
        std::all_of(s.zeros.begin(), s.zeros.end(), [](const ZeroCertificate& z) { return z.transversal; });
    std::string detail = std::to_string(s.zeros.size()) + " zero(s) examined";
    const std::size_t unknowns = rep.param_dim + 2;
    if (!all_transversal && unknowns < 2 * rep.target_dim) {
        detail += "; the system has " + std::to_string(unknowns) + " unknowns for " +
                  std::to_string(2 * rep.target_dim) + " equations, so no zero can be transverse";
    }
    r.add_check("transversal-zeros", "every zero has residual within tolerance and Jacobian rank 2n",
                all_transversal, detail);
}

Report verify_generator(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    const std::size_t n = spec.n;
    if (n < 2) throw InputError("verify-generator needs --n >= 2");
    r.inputs = {{"n", std::to_string(n)}, {"samples", std::to_string(spec.samples)}};
    const TripleSearchOptions opts = search_options(spec);
    echo_search_tolerances(r, opts);
    r.tolerances.push_back({"location", "1e-08"});
    r.tolerances.push_back({"min-pivot-floor", "0.4"});
    r.tolerances.push_back({"quartic-band", "0.05"});
    r.tolerances.push_back({"missing-point-floor", "0.001"});

    // Missing points of the alpha maps.
    RealVector p1(n, 0.0), p2(n, 0.0), top(n, 0.0);
    p1.back() = 0.5;
    p2.back() = -0.5;
    top.back() = 1.0;
    const double d1 = sample_min_distance(AlphaVariant::Sphere, n, p1, spec.samples);
    const double d2 = sample_min_distance(AlphaVariant::Sphere, n, p2, spec.samples);
    const double dh = sample_min_distance(AlphaVariant::Half, n, p1, spec.samples);
    const double dn = sample_min_distance(AlphaVariant::NegHalf, n, p2, spec.samples);
    const double dc = sample_min_distance(AlphaVariant::Sphere, n, top, spec.samples);
    r.results.push_back({"distance alpha to (0,1/2)", fmt(d1)});
    r.results.push_back({"distance alpha to (0,-1/2)", fmt(d2)});
    r.results.push_back({"distance alpha_1/2 to (0,1/2)", fmt(dh)});
    r.results.push_back({"distance alpha_-1/2 to (0,-1/2)", fmt(dn)});
    r.results.push_back({"distance alpha to (0,1)", fmt(dc)});
    r.add_check("missing-point", "alpha misses (0,1/2) and (0,-1/2); alpha_1/2 and alpha_-1/2 miss their base points",
                d1 > 1e-3 && d2 > 1e-3 && dh > 1e-3 && dn > 1e-3,
                "min distances " + fmt(d1) + ", " + fmt(d2) + ", " + fmt(dh) + ", " + fmt(dn));
    r.add_check("missing-point-control", "the sampler reaches an attained value (0,1)", dc <= 1e-6,
                "min distance " + fmt(dc));

    const PairMapSpec family = generator_family(n);
    const IsovarianceReport iso = check_isovariance(family, 1000);
    r.add_check("isovariance", "F(x,y) = -F(y,x) and F(x,y) != 0 on sampled parameters", iso.passed,
                "max defect " + fmt(iso.max_antisymmetry_defect) + ", min norm " + fmt(iso.min_norm));

    const ObstructionReport rep = compute_obstruction(family, opts, OrientationConvention::JacobianDeterminant);
    r.results.push_back({"expected dimension of Z", std::to_string(rep.total_dimension)});
    add_search_checks(r, rep);
    if (rep.consistency_error) return r;

    r.add_check("orbit-count", "exactly one zero orbit under relabeling (three swap orbits)",
                rep.orbits.quotient_size() == 1 && rep.orbits.sigma2_orbits.size() == 3,
                std::to_string(rep.orbits.quotient_size()) + " orbit(s)");

    const ZeroCertificate* base = nullptr;
    for (const auto& z : rep.search.zeros)
        if (z.location.labels == LabelOrdering{0, 1, 2}) base = &z;
    if (!base) {
        r.add_check("unique-zero", "the zero sits at (v,w) = (0,0), a12 = a31 = 2", false,
                    "no zero with labels (1 2 3)");
    } else {
        const auto& p = base->location;
        const double off = std::max({max_norm(p.s), std::abs(p.a12 - 2.0), std::abs(p.a31 - 2.0)});
        r.add_check("unique-zero", "the zero sits at (v,w) = (0,0), a12 = a31 = 2",
                    rep.search.zeros.size() == 6 && off <= 1e-8 && base->residual <= opts.res_tol,
                    "deviation " + fmt(off) + ", residual " + fmt(base->residual));
        r.add_check("jacobian-rank", "DF' has rank 2n at the zero, smallest pivot at least 0.4",
                    base->jacobian_rank == 2 * n && base->min_pivot >= 0.4,
                    "rank " + std::to_string(base->jacobian_rank) + " of " + std::to_string(2 * n) +
                        ", min pivot " + fmt(base->min_pivot));
    }
    bool quartic_clear = true;
    for (const auto& z : rep.search.zeros) {
        double ww = 0.0;
        for (std::size_t k = n - 1; k < z.location.s.size(); ++k) ww += z.location.s[k] * z.location.s[k];
        if (std::abs(ww - 0.5) <= 0.05 || std::abs(ww - 1.0) <= 0.05) quartic_clear = false;
    }
    r.add_check("quartic-roots-rejected", "no zero with |w|^2 near 1/2 or 1", quartic_clear,
                quartic_clear ? "none found" : "zero near a quartic root");
    if (rep.zero_dim_class) {
        const auto& cls = *rep.zero_dim_class;
        r.results.push_back({"class count", std::to_string(cls.count)});
        r.results.push_back({"class mod 2", std::to_string(cls.mod2)});
        if (cls.signed_count) r.results.push_back({"class signed count", std::to_string(*cls.signed_count)});
    }

    if (n == 3) {
        GaussOptions g;
        g.threads = spec.threads;
        const AlphaLinkingResult lk = alpha_preimage_linking({}, g);
        const long s = std::lround(lk.gauss.value);
        r.results.push_back({"preimage curve vertices", std::to_string(lk.upper.size()) + ", " + std::to_string(lk.lower.size())});
        r.results.push_back({"projection pole", fmt_vector(lk.pole)});
        r.results.push_back({"gauss linking", fmt(lk.gauss.value)});
        r.results.push_back({"crossing linking", std::to_string(lk.crossing.linking)});
        r.add_check("linking-number", "the preimages of (0,1) and (0,-1) link once",
                    std::abs(std::abs(s) - 1) == 0 && std::abs(lk.gauss.value - static_cast<double>(s)) <= 1e-2 &&
                        lk.crossing.linking == s,
                    "gauss " + fmt(lk.gauss.value) + ", crossings " + std::to_string(lk.crossing.linking));
    }
    return r;
}

Report triple_obstruction(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    if (spec.inputs.size() != 1) throw InputError("triple-obstruction takes one spec file");
    const PairMapFile file = read_pair_map_file(spec.inputs[0]);
    r.inputs = {{"spec", spec.inputs[0]}, {"kind", file.kind}, {"m", std::to_string(file.m)}, {"n", std::to_string(file.n)}};
    for (std::size_t i = 0; i < file.points.size(); ++i) {
        r.inputs.push_back({"point " + std::to_string(i + 1), fmt_vector(file.points[i])});
    }
    if (file.param) r.inputs.push_back({"param", fmt_vector(*file.param)});
    const PairMapSpec map = build_pair_map(file);
    const TripleSearchOptions opts = search_options(spec);
    echo_search_tolerances(r, opts);

    const IsovarianceReport iso = check_isovariance(map, 256);
    r.add_check("isovariance", "the pair map is antisymmetric and vanishes nowhere off the diagonal", iso.passed,
                "max defect " + fmt(iso.max_antisymmetry_defect) + ", min norm " + fmt(iso.min_norm));

    const ObstructionReport rep = compute_obstruction(map, opts, OrientationConvention::JacobianDeterminant);
    r.results.push_back({"manifold dimension", std::to_string(rep.manifold_dim)});
    r.results.push_back({"parameter dimension", std::to_string(rep.param_dim)});
    r.results.push_back({"expected dimension 3m-2n+2", std::to_string(rep.expected_dimension)});
    r.results.push_back({"expected dimension with parameters", std::to_string(rep.total_dimension)});
    add_search_checks(r, rep);
    if (!rep.consistency_error) {
        r.results.push_back({"|Z|", std::to_string(rep.orbits.quotient_size())});
        if (rep.zero_dim_class) {
            r.results.push_back({"class mod 2", std::to_string(rep.zero_dim_class->mod2)});
            if (rep.zero_dim_class->signed_count) {
                r.results.push_back({"class signed count", std::to_string(*rep.zero_dim_class->signed_count)});
            }
        }
        for (std::size_t i = 0; i < rep.representatives.size(); ++i) {
            r.certificates.push_back("representative " + std::to_string(i + 1) + ": " +
                                     describe_zero(rep.search.zeros[rep.representatives[i]]));
        }
    }
    return r;
}

Report double_obstruction(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    if (spec.inputs.size() != 1) throw InputError("double-obstruction takes one spec file");
    const PairMapFile file = read_pair_map_file(spec.inputs[0]);
    r.inputs = {{"spec", spec.inputs[0]}, {"kind", file.kind}, {"m", std::to_string(file.m)}, {"n", std::to_string(file.n)}};
    if (file.kind == "chart") {
        const Chart chart = build_chart(file);
        r.inputs.push_back({"chart", chart.name});
        r.inputs.push_back({"period", fmt(chart.period)});
        DoublePointOptions o;
        if (spec.tol_residual) o.res_tol = *spec.tol_residual;
        if (spec.tol_pivot) o.rel_pivot_tol = *spec.tol_pivot;
        if (spec.grid) o.grid = *spec.grid;
        o.threads = spec.threads;
        const double margin = chart.period / 50.0;
        r.tolerances = {{"residual", fmt(o.res_tol)}, {"relative-pivot", fmt(o.rel_pivot_tol)},
                        {"grid", std::to_string(o.grid)}, {"diagonal-margin", fmt(margin)},
                        {"dedup", fmt(o.dedup_radius)}};
        const IsovarianceReport iso = check_isovariance(chart, 256);
        r.add_check("immersion", "the chart is a well-defined closed curve", iso.max_antisymmetry_defect <= 1e-9,
                    "max defect " + fmt(iso.max_antisymmetry_defect));
        const DoublePointResult res = double_point_zeros(chart, o);
        r.results.push_back({"expected dimension 2m-n", std::to_string(res.expected_dimension)});
        r.results.push_back({"double points", std::to_string(res.points.size())});
        r.results.push_back({"diagonal limits", std::to_string(res.diagonal_hits)});
        for (const auto& p : res.points) {
            r.certificates.push_back("double point {" + fmt(p.x) + ", " + fmt(p.y) + "} residual=" + fmt(p.residual) +
                                     " rank=" + std::to_string(p.jacobian_rank) + " min_pivot=" + fmt(p.min_pivot) +
                                     " transversal=" + (p.transversal ? "yes" : "no"));
        }
        for (const auto& s : res.suspects) {
            r.certificates.push_back("suspect {" + fmt(s.x) + ", " + fmt(s.y) + "} residual=" + fmt(s.residual) +
                                     " reason=" + s.reason);
        }
        const bool converged = std::all_of(res.points.begin(), res.points.end(),
                                           [](const DoublePoint& p) { return p.converged; });
        r.add_check("certified-double-points", "every double point has residual within tolerance", converged,
                    std::to_string(res.points.size()) + " point(s)");
        if (res.expected_dimension == 0) {
            const bool transversal = std::all_of(res.points.begin(), res.points.end(),
                                                 [](const DoublePoint& p) { return p.transversal; });
            r.add_check("transversal-double-points", "every double point is an isolated transverse crossing",
                        transversal, std::to_string(res.points.size()) + " point(s)");
        }
        r.add_check("no-suspect-double-points", "no unresolved near-coincidences",
                    res.suspects.empty() ? CheckStatus::Pass : CheckStatus::Suspect,
                    std::to_string(res.suspects.size()) + " suspect(s)");
        return r;
    }
    if (file.kind == "builtin:difference") {
        for (std::size_t i = 0; i < file.points.size(); ++i) {
            r.inputs.push_back({"point " + std::to_string(i + 1), fmt_vector(file.points[i])});
        }
        const double tol = spec.tol_residual.value_or(1e-12);
        r.tolerances = {{"coincidence", fmt(tol)}};
        const auto pairs = double_points_finite(file.points, tol);
        r.results.push_back({"double points", std::to_string(pairs.size())});
        for (const auto& [i, j] : pairs) {
            r.certificates.push_back("coincident points " + std::to_string(i + 1) + " and " + std::to_string(j + 1));
        }
        r.add_check("embedding", "the finite configuration has no double points", pairs.empty(),
                    std::to_string(pairs.size()) + " coincident pair(s)");
        return r;
    }
    throw InputError("double-obstruction needs kind chart or builtin:difference");
}

Report linking_command(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    if (spec.inputs.size() != 2) throw InputError("linking takes two curve files");
    PolyCurve a = read_curve_file(spec.inputs[0]);
    PolyCurve b = read_curve_file(spec.inputs[1]);
    r.inputs = {{"curve A", spec.inputs[0] + " (" + std::to_string(a.size()) + " vertices in R^" + std::to_string(a.dimension()) + ")"},
                {"curve B", spec.inputs[1] + " (" + std::to_string(b.size()) + " vertices in R^" + std::to_string(b.dimension()) + ")"}};
    if (a.dimension() != b.dimension()) throw InputError("linking: curves live in different dimensions");
    if (a.dimension() == 4) {
        const PolyCurve both[] = {a, b};
        const RealVector pole = suggest_pole(both);
        r.results.push_back({"projection pole", fmt_vector(pole)});
        a = stereo_project(a, pole);
        b = stereo_project(b, pole);
    }
    GaussOptions g;
    g.threads = spec.threads;
    r.tolerances = {{"integrality", "0.01"}, {"refinement", fmt(g.refine_tol)}, {"proximity", fmt(kProximityTol)}};
    const GaussResult gauss = gauss_linking_detail(a, b, g);
    const CrossingResult cross = crossing_linking_detail(a, b, kDefaultProjectionDirection);
    const long s = std::lround(gauss.value);
    r.results.push_back({"curve distance", fmt(curve_distance(a, b))});
    r.results.push_back({"gauss linking", fmt(gauss.value)});
    r.results.push_back({"gauss subdivision", std::to_string(gauss.subdivision)});
    r.results.push_back({"crossing linking", std::to_string(cross.linking)});
    r.results.push_back({"crossings", std::to_string(cross.crossings)});
    r.results.push_back({"projection direction", fmt_vector({cross.direction.begin(), cross.direction.end()})});
    r.add_check("integer-linking", "the Gauss integral is within 0.01 of an integer",
                std::abs(gauss.value - static_cast<double>(s)) <= 1e-2, "value " + fmt(gauss.value));
    r.add_check("crossing-agreement", "the signed crossing count equals the rounded Gauss integral",
                cross.linking == s, std::to_string(cross.linking) + " vs " + std::to_string(s));
    return r;
}

Report knotting_command(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    r.inputs = {{"kmax", std::to_string(spec.kmax)}};
    const auto rows = knotting_table(spec.kmax);
    bool parity = true;
    for (const auto& row : rows) {
        r.results.push_back({"k=" + std::to_string(row.k),
                             to_string(row.group) + " (w(" + std::to_string(3 * row.k + 2) + "P)=" +
                                 (row.w_plane > 0 ? "+1" : "-1") + ", w(tangent)=" +
                                 (row.w_tangent > 0 ? "+1" : "-1") + ")"});
        parity = parity && (row.group == GroupTag::Z) == (row.k % 2 == 1);
    }
    r.add_check("knotting-parity", "the group is Z for odd k and Z2 for even k", parity,
                std::to_string(rows.size()) + " row(s) computed from determinant signs");
    return r;
}

Report pi0_command(const RunSpec& spec) {
    Report r;
    r.command = spec.command;
    r.strict = spec.strict;
    if (spec.inputs.size() != 1) throw InputError("pi0 takes one configuration file");
    const CobConfig c = read_cob_config_file(spec.inputs[0]);
    r.inputs = {{"config", spec.inputs[0]},
                {"vertices", std::to_string(c.vertex_count)},
                {"edges", std::to_string(c.edges.size())},
                {"points", std::to_string(c.points.size())}};
    const auto components = graph_components(c);
    const auto classes = normalize_components(c);
    r.results.push_back({"components", std::to_string(components.size())});
    bool agree = true;
    bool witnesses = true;
    for (std::size_t k = 0; k < components.size(); ++k) {
        CobConfig part;
        std::vector<std::size_t> index(c.vertex_count, 0);
        for (std::size_t i = 0; i < components[k].size(); ++i) index[components[k][i]] = i;
        part.vertex_count = components[k].size();
        std::vector<char> inside(c.vertex_count, 0);
        for (auto v : components[k]) inside[v] = 1;
        for (const auto& e : c.edges)
            if (inside[e.u]) part.edges.push_back({index[e.u], index[e.v], e.w_xi, e.w_eta});
        for (const auto& p : c.points)
            if (inside[p.vertex]) part.points.push_back({index[p.vertex], p.sign});
        const auto [xi, eta] = cycle_characters(part);
        const GroupTag tag = classify_pi0(xi, eta);
        const ClassValue& cls = classes[k];
        agree = agree && tag == cls.tag();
        std::string vertices;
        for (auto v : components[k]) vertices += (vertices.empty() ? "" : " ") + std::to_string(v);
        r.results.push_back({"component " + std::to_string(k + 1),
                             "vertices {" + vertices + "} group " + to_string(tag) + " class " +
                                 std::to_string(cls.value) + (cls.twisted ? " (mod 2)" : "")});
        if (cls.twisted && !part.points.empty()) {
            const auto moves = flip_witness(part, 0);
            bool ok = moves.has_value();
            if (ok) {
                CobConfig walked = part;
                for (const auto& m : *moves) walked = apply_move(walked, m);
                CobConfig flipped = part;
                flipped.points[0].sign = -flipped.points[0].sign;
                ok = canonical_points(walked) == canonical_points(flipped);
                r.certificates.push_back("component " + std::to_string(k + 1) + ": point at vertex " +
                                         std::to_string(components[k][part.points[0].vertex]) +
                                         " reverses its sign after " + std::to_string(moves->size()) +
                                         " transport move(s)");
            }
            witnesses = witnesses && ok;
        }
    }
    r.add_check("classification", "the pi_0 group from the characters matches the complete invariant", agree,
                std::to_string(components.size()) + " component(s)");
    const bool any_twisted = std::any_of(classes.begin(), classes.end(), [](const ClassValue& v) { return v.twisted; });
    r.add_check("sign-reversal-witness", "every twisted component carries a move sequence from +x to -x",
                witnesses, !any_twisted ? "no twisted component" : witnesses ? "verified by replaying the moves" : "witness failed");
    return r;
}

}  // namespace

void validate_run_spec(const RunSpec& spec) {
    if (std::find(kCommands.begin(), kCommands.end(), spec.command) == kCommands.end()) {
        throw InputError("unknown command '" + spec.command + "'");
    }
    auto positive = [](const std::optional<double>& v, const char* name) {
        if (v && !(*v > 0.0 && std::isfinite(*v))) throw InputError(std::string(name) + " must be positive");
    };
    positive(spec.tol_residual, "--tol-residual");
    positive(spec.tol_pivot, "--tol-pivot");
    positive(spec.a_min, "--a-min");
    positive(spec.a_max, "--a-max");
    if (spec.a_min && spec.a_max && !(*spec.a_min < *spec.a_max)) throw InputError("--a-min must be below --a-max");
    if (spec.grid && *spec.grid < 2) throw InputError("--grid must be at least 2");
    if (spec.threads == 0) throw InputError("--threads must be at least 1");
    if (spec.kmax == 0) throw InputError("--kmax must be at least 1");
    if (spec.samples < 1000) throw InputError("--samples must be at least 1000");
}

Report run(const RunSpec& spec) {
    try {
        validate_run_spec(spec);
        if (spec.command == "verify-generator") return verify_generator(spec);
        if (spec.command == "triple-obstruction") return triple_obstruction(spec);
        if (spec.command == "double-obstruction") return double_obstruction(spec);
        if (spec.command == "linking") return linking_command(spec);
        if (spec.command == "knotting-table") return knotting_command(spec);
        return pi0_command(spec);
    } catch (const InputError& e) {
        Report r;
        r.command = spec.command;
        r.strict = spec.strict;
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) r.inputs.push_back({"argument " + std::to_string(i + 1), spec.inputs[i]});
        r.error = e.what();
        return r;
    } catch (const NumericalError& e) {
        Report r;
        r.command = spec.command;
        r.strict = spec.strict;
        r.add_check("numerical", "the computation completed", false, e.what());
        return r;
    }
}

std::string render(const Report& report, bool machine) {
    return machine ? render_machine(report) : render_text(report);
}

unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("OBSTRUKT_THREADS")) {
        const long v = parse_long(env, "OBSTRUKT_THREADS");
        if (v < 1) throw InputError("OBSTRUKT_THREADS must be at least 1");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

PairMapFile parse_pair_map(std::istream& in) {
    const KeyedText text = KeyedText::parse(in);
    text.allow_only({"m", "n", "kind", "points", "chart", "period", "param"});
    PairMapFile f;
    f.kind = text.require("kind").value;
    f.n = parse_count(text.require("n").value, "n");
    if (const auto* m = text.find("m")) f.m = parse_count(m->value, "m");
    if (const auto* pts = text.find("points")) {
        if (!pts->value.empty()) f.points.push_back(parse_vector(pts->value, "points"));
        for (const auto& item : pts->items) f.points.push_back(parse_vector(item, "points"));
    }
    if (const auto* c = text.find("chart")) f.chart = c->value;
    if (const auto* p = text.find("period")) {
        f.period = parse_double(p->value, "period");
        if (*f.period == 0.0 || !(*f.period > 0.0)) throw InputError("period must be positive");
    }
    if (const auto* p = text.find("param")) {
        RealVector s;
        if (!p->value.empty()) s = parse_vector(p->value, "param");
        for (const auto& item : p->items) {
            const RealVector more = parse_vector(item, "param");
            s.insert(s.end(), more.begin(), more.end());
        }
        f.param = s;
    }
    if (f.n == 0) throw InputError("n must be positive");
    if (f.kind == "builtin:difference") {
        if (f.points.empty()) throw InputError("builtin:difference needs a points list");
        if (text.find("m") == nullptr) f.m = f.points.front().size();
        for (const auto& p : f.points) {
            if (p.size() != f.m) throw InputError("every point must have m = " + std::to_string(f.m) + " coordinates");
        }
        if (f.m > f.n) throw InputError("points of R^m need m <= n");
    } else if (f.kind == "builtin:generator") {
        if (f.n < 2) throw InputError("builtin:generator needs n >= 2");
        if (f.param && f.param->size() != 2 * f.n - 2) {
            throw InputError("param for builtin:generator needs 2n-2 = " + std::to_string(2 * f.n - 2) + " entries");
        }
    } else if (f.kind == "chart") {
        if (f.chart.empty()) throw InputError("kind chart needs a chart name");
        if (text.find("m") && f.m != 1) throw InputError("charts parametrize a circle, so m must be 1");
        f.m = 1;
    } else {
        throw InputError("kind must be builtin:generator, builtin:difference or chart, got '" + f.kind + "'");
    }
    return f;
}

PairMapFile read_pair_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open spec file: " + path);
    return parse_pair_map(in);
}

PairMapSpec build_pair_map(const PairMapFile& file) {
    if (file.kind == "builtin:generator") {
        return file.param ? generator_at(file.n, *file.param) : generator_family(file.n);
    }
    if (file.kind == "builtin:difference") {
        return difference_map(PointConfig(file.m, file.points), file.n);
    }
    throw InputError("triple obstruction of a chart is not supported; use double-obstruction");
}

Chart build_chart(const PairMapFile& file) {
    if (file.kind != "chart") throw InputError("not a chart spec");
    Chart chart = named_chart(file.chart, file.n);
    if (file.period && std::abs(*file.period - chart.period) > 1e-9 * chart.period) {
        throw InputError("period " + fmt(*file.period) + " does not match the chart period " + fmt(chart.period));
    }
    return chart;
}

}  // namespace obstrukt
