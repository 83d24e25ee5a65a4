#include "tbp/io.hpp"

#include <cmath>
#include <cstdio>

namespace tbp::io {

std::string fmt(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

json num(double x)
{
    if (std::isfinite(x)) return x;
    return fmt(x);  // json has no nan/inf
}

json vec_json(const VecX& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

}  // namespace

json to_json(const LagrangePointSet& pts, double mu)
{
    json out;
    out["mu"] = mu;
    out["ordering_holds"] = pts.ordering_holds();
    out["points"] = json::array();
    for (const LagrangePoint& p : pts.points)
        out["points"].push_back({{"label", p.label}, {"q1", p.position.x()}, {"q2", p.position.y()}, {"energy", p.energy}});
    return out;
}

json surface_json(const RegularizedSurface& s)
{
    return {{"problem", to_string(s.problem().kind())},
            {"mu", s.problem().mu()},
            {"c", s.energy()},
            {"primary", to_string(s.primary())},
            {"level", s.level()}};
}

json hill_region_header(const HillRegionGrid& g)
{
    json comps = json::array();
    for (const HillComponent& c : g.components)
        comps.push_back({{"label", c.label}, {"kind", to_string(c.kind)}, {"cells", c.cells}});
    return {{"kind", g.kind},
            {"mu", g.mu},
            {"c", g.c},
            {"nx", g.spec.nx},
            {"ny", g.spec.ny},
            {"bounds", {g.spec.xmin, g.spec.xmax, g.spec.ymin, g.spec.ymax}},
            {"bounded_components", g.bounded_count()},
            {"components", comps}};
}

void write_hill_region_csv(std::ostream& os, const HillRegionGrid& g)
{
    os << "q1,q2,U,inside,component\n";
    for (int j = 0; j < g.spec.ny; ++j)
        for (int i = 0; i < g.spec.nx; ++i) {
            std::size_t k = g.index(i, j);
            Vec2 q = g.center(i, j);
            os << fmt(q.x()) << ',' << fmt(q.y()) << ',' << fmt(g.potential[k]) << ',' << int(g.inside[k]) << ','
               << g.component[k] << '\n';
        }
}

void write_circle_csv(std::ostream& os, const RegularizedSurface& s, const FixedLocusCircle& c)
{
    os << "theta,f,xi0,xi2,q1_projected\n";
    for (std::size_t i = 0; i < c.theta.size(); ++i) {
        SpherePhasePoint w = c.point(i);
        double q1 = std::nan("");
        if (1.0 - w.xi[0] > 1e-12) q1 = moser_map(s, w).q1;
        os << fmt(c.theta[i]) << ',' << fmt(c.f[i]) << ',' << fmt(w.xi[0]) << ',' << fmt(w.xi[2]) << ',' << fmt(q1) << '\n';
    }
}

json trajectory_header(const Trajectory& tr)
{
    return {{"chart", to_string(tr.chart)}, {"samples", tr.size()}, {"max_drift", num(tr.max_drift())}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr)
{
    os << "t";
    const Eigen::Index n = tr.size() ? tr.x[0].size() : 0;
    for (Eigen::Index k = 0; k < n; ++k) os << ",x" << k;
    os << ",drift\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        os << fmt(tr.t[i]);
        for (Eigen::Index k = 0; k < n; ++k) os << ',' << fmt(tr.x[i][k]);
        os << ',' << fmt(i < tr.drift.size() ? tr.drift[i] : 0.0) << '\n';
    }
}

json orbit_json(const SymmetricOrbit& o, int samples)
{
    json pts = json::array();
    for (int i = 0; i <= samples; ++i) {
        double t = o.T * i / samples;
        Vec6 w = o.at(t).vec();
        json row = json::array({t});
        for (int k = 0; k < 6; ++k) row.push_back(w[k]);
        pts.push_back(row);
    }
    return {{"problem", to_string(o.kind)},
            {"mu", o.mu},
            {"c", o.c},
            {"primary", to_string(o.primary)},
            {"circle_start", o.start_sign > 0 ? "L+" : "L-"},
            {"circle_end", o.end_sign > 0 ? "L+" : "L-"},
            {"theta0", o.theta0},
            {"half_period", o.T},
            {"half_period_physical", num(o.T_phys)},
            {"crossing", o.crossing},
            {"type", to_string(o.type)},
            {"residual", o.residual},
            {"nondegeneracy", o.nondegeneracy},
            {"near_pole", o.near_pole},
            {"samples", pts}};
}

json index_json(const std::string& orbit_id, const IndexValue& rs, const MeanIndexReport* mean)
{
    json cr = json::array();
    for (const Crossing& c : rs.crossings) cr.push_back({{"t", c.t}, {"sign", c.twice}, {"endpoint", c.endpoint}});
    json out{{"orbit_id", orbit_id}, {"mu_rs", rs.str()}, {"mu_rfh", rfh_index(rs).str()}, {"crossings", cr}};
    if (mean) {
        out["mean_rs"] = num(mean->mean_rs);
        out["mean_cz_double"] = num(mean->mean_cz_double);
        out["defect"] = num(mean->defect);
        out["skipped_iterates"] = mean->skipped;
    }
    return out;
}

json convexity_json(const RegularizedSurface* base, const ConvexityReport& r)
{
    json out;
    if (base) {
        out["mu"] = base->problem().mu();
        out["c"] = base->energy();
        out["primary"] = to_string(base->primary());
    }
    out["samples"] = r.samples;
    out["min_restricted_eigenvalue"] = num(r.min_eigenvalue);
    out["location"] = vec_json(r.location);
    out["pass"] = r.pass;
    out["certified_failure"] = r.certified;
    return out;
}

json homology_json(const GradedRanks& g, int from, int to)
{
    json ranks = json::object();
    for (int k = from; k <= to; ++k) {
        auto r = g.rank(k);
        ranks[std::to_string(k)] = r ? json(*r) : json("not computed");
    }
    return {{"ranks", ranks}, {"tail", g.tail}, {"tail_from", g.high()}};
}

}  // namespace tbp::io
