#pragma once

#include <ostream>

#include "json.hpp"
#include "tbp/convexity.hpp"
#include "tbp/homology.hpp"
#include "tbp/index.hpp"
#include "tbp/orbits.hpp"

namespace tbp::io {

using nlohmann::json;

json to_json(const LagrangePointSet& pts, double mu);
json surface_json(const RegularizedSurface& s);

json hill_region_header(const HillRegionGrid& g);
void write_hill_region_csv(std::ostream& os, const HillRegionGrid& g);

void write_circle_csv(std::ostream& os, const RegularizedSurface& s, const FixedLocusCircle& c);

json trajectory_header(const Trajectory& tr);
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

json orbit_json(const SymmetricOrbit& o, int samples = 200);
json index_json(const std::string& orbit_id, const IndexValue& rs, const MeanIndexReport* mean);
json convexity_json(const RegularizedSurface* base, const ConvexityReport& r);
json homology_json(const GradedRanks& g, int from, int to);

// Fixed precision, so repeated runs print identical bytes.
std::string fmt(double x);

}  // namespace tbp::io
