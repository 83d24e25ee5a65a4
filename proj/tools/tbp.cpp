// Command-line front end.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance_suite.hpp"
#include "tbp/convexity.hpp"
#include "tbp/errors.hpp"
#include "tbp/homology.hpp"
#include "tbp/index.hpp"
#include "tbp/io.hpp"
#include "tbp/log.hpp"
#include "tbp/orbits.hpp"

using namespace tbp;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string problem = "pcrtbp";
    double mu = 0.1;
    std::optional<double> c;
    std::string primary = "moon";
    double atol = 1e-12, rtol = 1e-12, max_step = 0.05;
    int scan = 720;
    std::vector<int> crossings{1, 2, 3};
    std::string output = "-";
    std::string format;
    std::uint64_t seed = 1;

    Problem make_problem() const
    {
        if (problem == "pcrtbp") return Problem::pcrtbp(mu);
        if (problem == "kepler") return Problem::rotating_kepler();
        return Problem::hill_lunar();
    }
    Primary make_primary() const
    {
        if (problem == "kepler") return Primary::Earth;
        if (problem == "hill") return Primary::Moon;
        return primary == "earth" ? Primary::Earth : Primary::Moon;
    }
    // default energy: 0.2 below the first critical value
    double energy() const
    {
        if (c) return *c;
        if (problem == "pcrtbp") return lagrange_points(mu)[1].energy - 0.2;
        if (problem == "kepler") return -2.5;
        return hill_critical_energy() - 0.2;
    }
    RegularizedSurface surface() const { return RegularizedSurface(make_problem(), make_primary(), energy()); }
    IntegratorConfig integ() const
    {
        IntegratorConfig cfg;
        cfg.atol = atol;
        cfg.rtol = rtol;
        cfg.max_step = max_step;
        cfg.validate();
        return cfg;
    }
    SolverConfig solver() const
    {
        SolverConfig s;
        s.integ = integ();
        s.scan = scan;
        s.crossings = crossings;
        s.validate();
        return s;
    }

    void validate() const
    {
        if (problem != "pcrtbp" && problem != "kepler" && problem != "hill")
            throw std::invalid_argument("problem must be pcrtbp, kepler or hill");
        if (problem == "pcrtbp" && !(mu > 0 && mu < 1)) throw std::invalid_argument("mu must lie in (0, 1)");
        if (primary != "moon" && primary != "earth") throw std::invalid_argument("primary must be moon or earth");
        if (scan < 8) throw std::invalid_argument("scan must be at least 8");
        for (int n : crossings)
            if (n < 1) throw std::invalid_argument("crossing counts start at 1");
        if (!format.empty() && format != "json" && format != "csv" && format != "text")
            throw std::invalid_argument("format must be json, csv or text");
    }

    json resolved() const
    {
        return {{"problem", problem},  {"mu", problem == "pcrtbp" ? mu : 0.0},
                {"c", energy()},       {"primary", to_string(make_primary())},
                {"atol", atol},        {"rtol", rtol},
                {"max_step", max_step}, {"scan", scan},
                {"crossings", crossings}, {"seed", seed}};
    }
};

// Output sink: stdout or a file.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::invalid_argument("cannot open output file " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void emit_json(const RunConfig& rc, json body)
{
    Sink s(rc.output);
    json out{{"config", rc.resolved()}};
    for (auto& [k, v] : body.items()) out[k] = v;
    s.os() << out.dump(2) << '\n';
}

std::string fmt6(double x)
{
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::vector<SymmetricOrbit> solve(const RunConfig& rc, const RegularizedSurface& s)
{
    ScanDiagnostics diag;
    auto orbits = find_symmetric_orbits(s, rc.solver(), &diag);
    log_info("scan: " + std::to_string(diag.samples) + " samples, " + std::to_string(diag.brackets) + " brackets, " +
             std::to_string(orbits.size()) + " orbits");
    return orbits;
}

// ---------------------------------------------------------------- subcommands

int cmd_lagrange(const RunConfig& rc)
{
    LagrangePointSet pts = lagrange_points(rc.mu);
    if (rc.format == "text") {
        for (const LagrangePoint& p : pts.points)
            std::cout << p.label << "  q = (" << fmt6(p.position.x()) << ", " << fmt6(p.position.y()) << ")  H = "
                      << io::fmt(p.energy) << '\n';
        std::cout << "ordering H(L1) < H(L2) <= H(L3) < H(L4) = H(L5): " << (pts.ordering_holds() ? "holds" : "FAILS") << '\n';
    } else {
        emit_json(rc, io::to_json(pts, rc.mu));
    }
    return pts.ordering_holds() ? 0 : 1;
}

int cmd_hill_region(const RunConfig& rc, const GridSpec& g)
{
    HillRegionGrid grid = hill_region(rc.make_problem(), rc.energy(), g);
    json head = io::hill_region_header(grid);
    head["config"] = rc.resolved();
    if (rc.format == "json") {
        emit_json(rc, {{"grid", head}});
    } else if (rc.format == "text") {
        ComponentCountReport rep = check_two_bounded_components(grid);
        std::cout << rep.message << '\n';
    } else {
        Sink s(rc.output);
        s.os() << "# " << head.dump() << '\n';
        io::write_hill_region_csv(s.os(), grid);
    }
    return 0;
}

int cmd_circles(const RunConfig& rc, int samples)
{
    RegularizedSurface s = rc.surface();
    auto [plus, minus] = fixed_locus_circles(s, samples);
    bool bad = plus.violation || minus.violation;
    if (rc.format == "json" || rc.format == "text") {
        json body{{"surface", io::surface_json(s)}};
        for (const FixedLocusCircle* c : {&plus, &minus})
            body[c->sign > 0 ? "L+" : "L-"] = {{"samples", c->theta.size()},
                                               {"q1_range", {c->q1_min, c->q1_max}},
                                               {"violation", c->violation},
                                               {"diagnostics", c->diagnostics}};
        if (rc.format == "json")
            emit_json(rc, body);
        else
            std::cout << body.dump(2) << '\n';
    } else {
        Sink out(rc.output);
        out.os() << "# " << json{{"config", rc.resolved()}, {"surface", io::surface_json(s)}}.dump() << '\n';
        out.os() << "# L+\n";
        io::write_circle_csv(out.os(), s, plus);
        out.os() << "# L-\n";
        io::write_circle_csv(out.os(), s, minus);
    }
    return bad ? 1 : 0;
}

int cmd_find(const RunConfig& rc)
{
    RegularizedSurface s = rc.surface();
    auto orbits = solve(rc, s);
    if (rc.format == "text") {
        std::cout << std::left << std::setw(4) << "#" << std::setw(6) << "from" << std::setw(6) << "to" << std::setw(16)
                  << "theta0" << std::setw(16) << "T" << std::setw(6) << "type"
                  << "residual\n";
        for (std::size_t i = 0; i < orbits.size(); ++i) {
            const SymmetricOrbit& o = orbits[i];
            std::cout << std::setw(4) << i << std::setw(6) << (o.start_sign > 0 ? "L+" : "L-") << std::setw(6)
                      << (o.end_sign > 0 ? "L+" : "L-") << std::setw(16) << fmt6(o.theta0) << std::setw(16) << fmt6(o.T)
                      << std::setw(6) << to_string(o.type) << o.residual << '\n';
        }
        return 0;
    }
    json arr = json::array();
    for (const SymmetricOrbit& o : orbits) arr.push_back(io::orbit_json(o));
    emit_json(rc, {{"surface", io::surface_json(s)}, {"orbits", arr}});
    return 0;
}

int cmd_classify(const RunConfig& rc, const std::vector<int>& kl, const std::string& orientation)
{
    json arr = json::array();
    if (!kl.empty()) {
        if (kl.size() != 2) throw std::invalid_argument("--kepler expects k,l");
        KeplerOrbitSpec sp;
        sp.k = kl[0];
        sp.l = kl[1];
        sp.orientation = orientation == "retrograde" ? Orientation::Retrograde : Orientation::Direct;
        sp.c = rc.energy();
        KeplerOracleResult r = kepler_oracle(sp);
        if (!r.feasible) throw std::invalid_argument(r.message);
        Classification cd = classify_detail(*r.orbit);
        arr.push_back({{"k", sp.k},
                       {"l", sp.l},
                       {"orientation", to_string(sp.orientation)},
                       {"type", to_string(cd.type)},
                       {"circle_type", to_string(cd.circle_type)},
                       {"plane_type", cd.plane_type ? to_string(*cd.plane_type) : "skipped"},
                       {"parity_rule_type", to_string(r.parity_type)}});
    } else {
        RegularizedSurface s = rc.surface();
        for (const SymmetricOrbit& o : solve(rc, s)) {
            Classification cd = classify_detail(o);
            arr.push_back({{"theta0", o.theta0},
                           {"half_period", o.T},
                           {"type", to_string(cd.type)},
                           {"circle_type", to_string(cd.circle_type)},
                           {"plane_type", cd.plane_type ? to_string(*cd.plane_type) : "skipped"},
                           {"flagged", cd.flagged}});
        }
    }
    if (rc.format == "text") {
        for (const json& j : arr) std::cout << j.dump() << '\n';
    } else {
        emit_json(rc, {{"classifications", arr}});
    }
    return 0;
}

int cmd_index(const RunConfig& rc, bool mean, int m_max)
{
    RegularizedSurface s = rc.surface();
    auto orbits = solve(rc, s);
    json arr = json::array();
    int status = 0;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        std::string id = "orbit-" + std::to_string(i);
        try {
            TransitionSeries half = orbit_transition(orbits[i], rc.integ());
            IndexValue rs = rs_index_of(half);
            if (mean) {
                MeanIndexReport rep = mean_indices(half, m_max);
                arr.push_back(io::index_json(id, rs, &rep));
            } else {
                arr.push_back(io::index_json(id, rs, nullptr));
            }
        } catch (const NumericalError& e) {
            arr.push_back({{"orbit_id", id}, {"error", e.what()}});
            status = 1;
        }
    }
    if (rc.format == "text") {
        for (const json& j : arr) {
            std::cout << j["orbit_id"].get<std::string>();
            if (j.contains("error")) {
                std::cout << "  error: " << j["error"].get<std::string>() << '\n';
                continue;
            }
            std::cout << "  mu_RS = " << j["mu_rs"].get<std::string>() << "  mu_RFH = " << j["mu_rfh"].get<std::string>();
            if (mean)
                std::cout << "  mean_RS = " << j["mean_rs"].dump() << "  mean_CZ(x^2)/2 = "
                          << (j["mean_cz_double"].is_number() ? fmt6(0.5 * j["mean_cz_double"].get<double>()) : "nan");
            std::cout << '\n';
        }
    } else {
        emit_json(rc, {{"surface", io::surface_json(s)}, {"indices", arr}});
    }
    return status;
}

int cmd_convexity(const RunConfig& rc, const std::string& surface, int samples, double r1, double r2)
{
    std::optional<CoverSurface> s;
    std::optional<RegularizedSurface> base;
    json extra;
    if (surface == "sphere") {
        s = round_sphere(1.0);
    } else if (surface == "ellipsoid") {
        s = ellipsoid_surface(r1, r2);
    } else if (surface == "dumbbell") {
        s = dumbbell_surface();
    } else if (surface == "cover") {
        base.emplace(rc.surface());
        s = levi_civita_cover(*base, static_cast<std::size_t>(std::max(samples / 4, 20)), rc.seed);
        CoverContractReport c = check_cover_contract(*s, static_cast<std::size_t>(std::max(samples / 4, 20)), rc.seed);
        extra["contract"] = {{"onto_error", c.onto_error},
                             {"equivariance_error", c.equivariance_error},
                             {"flow_deviation", c.flow_deviation},
                             {"min_radial_derivative", c.min_radial_derivative},
                             {"symmetry_error", c.symmetry_error}};
    } else {
        throw std::invalid_argument("surface must be sphere, ellipsoid, dumbbell or cover");
    }
    ConvexityReport rep = strict_convexity_check(*s, static_cast<std::size_t>(samples), rc.seed);
    json body = io::convexity_json(base ? &*base : nullptr, rep);
    body["surface"] = s->name;
    for (auto& [k, v] : extra.items()) body[k] = v;
    if (rc.format == "text")
        std::cout << s->name << ": " << rep.message << '\n';
    else
        emit_json(rc, {{"convexity", body}});
    return 0;
}

int cmd_ellipsoid(const RunConfig& rc, double r1, double r2, long max_den)
{
    EllipsoidOracle e = ellipsoid_oracle(r1, r2);
    EllipsoidCensus c = e.census(max_den);
    CoverSurface s = ellipsoid_surface(e.r1, e.r2);
    IndexValue cz_short = cz_index_of(reeb_transition(s, e.flow(std::sqrt(e.r1), 0, 0), e.T1(), rc.integ()));
    json body{{"r1", e.r1},
              {"r2", e.r2},
              {"T1", e.T1()},
              {"T2", e.T2()},
              {"rational_within_bound", c.rational},
              {"census", c.summary},
              {"short_orbit_cz", cz_short.str()}};
    if (c.rational) {
        body["p"] = c.p;
        body["q"] = c.q;
        body["common_period"] = c.common_period;
    } else {
        body["closed_orbit_periods"] = c.closed_orbit_periods;
    }
    if (e.r2 / e.r1 < 2 || !c.rational) {
        try {
            body["long_orbit_cz"] = cz_index_of(reeb_transition(s, e.flow(0, std::sqrt(e.r2), 0), e.T2(), rc.integ())).str();
        } catch (const NumericalError& ex) {
            body["long_orbit_cz"] = std::string("degenerate: ") + ex.what();
        }
    }
    if (rc.format == "text") {
        std::cout << "E(" << e.r1 << ", " << e.r2 << "): " << c.summary << "\nshort orbit CZ = " << cz_short.str() << '\n';
    } else {
        emit_json(rc, {{"ellipsoid", body}});
    }
    return 0;
}

int cmd_homology(const RunConfig& rc, bool table, int d, int n, int from, int to)
{
    GradedRanks path = path_space_ranks();
    if (table) {
        if (rc.format == "json") {
            emit_json(rc, {{"path_space", io::homology_json(path, 0, to)}});
        } else {
            std::cout << "degree  rank\n";
            for (int k = 0; k <= to; ++k) std::cout << std::setw(6) << k << "  " << *path.rank(k) << '\n';
            std::cout << "   ...  " << path.tail << '\n';
        }
        return 0;
    }
    GradedRanks r = rfh_ranks(path, d, n, from, to);
    if (rc.format == "json") {
        emit_json(rc, {{"d", d}, {"n", n}, {"rfh", io::homology_json(r, from, to)}});
    } else {
        std::cout << "degree  rank\n";
        for (int k = from; k <= to; ++k) {
            auto v = r.rank(k);
            std::cout << std::setw(6) << k << "  " << (v ? std::to_string(*v) : "not computed") << '\n';
        }
    }
    return 0;
}

int cmd_verify(const std::vector<int>& which)
{
    std::vector<int> ids = which;
    if (ids.empty())
        for (int k = 1; k <= acceptance::kCriteria; ++k) ids.push_back(k);
    int failed = 0;
    for (int k : ids) {
        acceptance::CriterionResult r = acceptance::run_criterion(k);
        std::cout << acceptance::format_line(r) << std::endl;
        if (!r.pass) ++failed;
    }
    std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria pass\n";
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symmetric periodic orbits of the regularized restricted three-body problem"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "file of key = value lines; command-line flags take precedence");

    RunConfig rc;
    app.add_option("--problem", rc.problem, "pcrtbp | kepler | hill")->capture_default_str();
    app.add_option("--mu", rc.mu, "mass ratio")->capture_default_str();
    app.add_option("--c", rc.c, "energy (default: 0.2 below the first critical value; -2.5 for kepler)");
    app.add_option("--primary", rc.primary, "moon | earth")->capture_default_str();
    app.add_option("--atol", rc.atol)->capture_default_str();
    app.add_option("--rtol", rc.rtol)->capture_default_str();
    app.add_option("--max-step", rc.max_step)->capture_default_str();
    app.add_option("--scan", rc.scan, "samples per fixed-locus circle")->capture_default_str();
    app.add_option("--crossings", rc.crossings, "axis crossing counts to shoot for")->delimiter(',')->capture_default_str();
    app.add_option("-o,--output", rc.output, "output path, - for stdout")->capture_default_str();
    app.add_option("--format", rc.format,
                   "json | csv | text (default json for records, csv for hill-region and circles)");
    app.add_option("--seed", rc.seed, "seed for sampling")->capture_default_str();

    auto* lag = app.add_subcommand("lagrange", "Lagrange points and their energies");
    GridSpec grid;
    auto* hill = app.add_subcommand("hill-region", "Hill's region on a grid with component labels");
    hill->add_option("--nx", grid.nx)->capture_default_str();
    hill->add_option("--ny", grid.ny)->capture_default_str();
    hill->add_option("--xmin", grid.xmin)->capture_default_str();
    hill->add_option("--xmax", grid.xmax)->capture_default_str();
    hill->add_option("--ymin", grid.ymin)->capture_default_str();
    hill->add_option("--ymax", grid.ymax)->capture_default_str();
    int circle_samples = 720;
    auto* circ = app.add_subcommand("circles", "the fixed-locus circles L+ and L-");
    circ->add_option("--samples", circle_samples)->capture_default_str();
    auto* find = app.add_subcommand("find-symmetric", "scan both circles for symmetric periodic orbits");
    std::vector<int> kl;
    std::string orientation = "direct";
    auto* cls = app.add_subcommand("classify", "type I / type II classification");
    cls->add_option("--kepler", kl, "classify the rotating Kepler ellipse k,l instead")->delimiter(',');
    cls->add_option("--orientation", orientation, "direct | retrograde")->capture_default_str();
    auto* idx = app.add_subcommand("index", "Robbin-Salamon indices of the orbits found");
    int m_max = 16;
    auto* mi = app.add_subcommand("mean-index", "mean indices of the orbits found");
    mi->add_option("--m-max", m_max)->capture_default_str();
    std::string surface = "cover";
    int samples = 400;
    double r1 = 1, r2 = 2;
    auto* cvx = app.add_subcommand("convexity", "strict convexity check of a hypersurface in R^4");
    cvx->add_option("--surface", surface, "sphere | ellipsoid | dumbbell | cover")->capture_default_str();
    cvx->add_option("--samples", samples)->capture_default_str();
    cvx->add_option("--r1", r1)->capture_default_str();
    cvx->add_option("--r2", r2)->capture_default_str();
    long max_den = 1000000;
    auto* ell = app.add_subcommand("ellipsoid", "Reeb flow census on an ellipsoid");
    ell->add_option("--r1", r1)->capture_default_str();
    ell->add_option("--r2", r2)->capture_default_str();
    ell->add_option("--max-denominator", max_den)->capture_default_str();
    bool table = false;
    int d = 1, n = 2, from = -10, to = 10;
    auto* hom = app.add_subcommand("homology", "graded ranks of path space and Rabinowitz Floer homology");
    hom->add_flag("--table", table, "path space ranks by degree");
    hom->add_option("--d", d)->capture_default_str();
    hom->add_option("--n", n)->capture_default_str();
    hom->add_option("--from", from)->capture_default_str();
    hom->add_option("--to", to)->capture_default_str();
    std::vector<int> which;
    auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
    ver->add_option("--criterion", which, "criterion numbers (default: all)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        if (code == 0) return 0;
        std::cerr << app.help();
        return 2;
    }

    try {
        rc.validate();
        if (rc.format.empty()) rc.format = (hill->parsed() || circ->parsed()) ? "csv" : "json";
        if (rc.format == "csv" && !(hill->parsed() || circ->parsed()))
            throw std::invalid_argument("csv output is only available for hill-region and circles");
        if (lag->parsed()) return cmd_lagrange(rc);
        if (hill->parsed()) return cmd_hill_region(rc, grid);
        if (circ->parsed()) return cmd_circles(rc, circle_samples);
        if (find->parsed()) return cmd_find(rc);
        if (cls->parsed()) return cmd_classify(rc, kl, orientation);
        if (idx->parsed()) return cmd_index(rc, false, m_max);
        if (mi->parsed()) return cmd_index(rc, true, m_max);
        if (cvx->parsed()) return cmd_convexity(rc, surface, samples, r1, r2);
        if (ell->parsed()) return cmd_ellipsoid(rc, r1, r2, max_den);
        if (hom->parsed()) return cmd_homology(rc, table, d, n, from, to);
        if (ver->parsed()) return cmd_verify(which);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
