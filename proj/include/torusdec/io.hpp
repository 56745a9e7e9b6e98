#ifndef TORUSDEC_IO_HPP_
#define TORUSDEC_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "torusdec/addcomb.hpp"
#include "torusdec/decompose.hpp"
#include "torusdec/granulation.hpp"
#include "torusdec/measure.hpp"
#include "torusdec/multiplier_set.hpp"
#include "torusdec/projection.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec::io {

using Json = nlohmann::ordered_json;

// {"Q": q, "weights": {"dense": [...]}} or {"Q": q, "weights": {"sparse": [[j, w], ...]}}.
Json measure_to_json(const GridMeasure& mu, bool sparse = true);
GridMeasure measure_from_json(const Json& j);
GridMeasure load_measure(const std::string& path);
void save_measure(const std::string& path, const GridMeasure& mu, bool sparse = true);

Json multipliers_to_json(const MultiplierSet& s);
MultiplierSet multipliers_from_json(const Json& j);
MultiplierSet load_multipliers(const std::string& path);

// Header n,re,im,abs, frequencies ascending.
std::string spectrum_csv(const Spectrum& spec);

// Rows "x,y"; a header line "x,y" is optional on input and always written.
std::vector<Point2> read_planar_csv(const std::string& path);
std::string planar_csv(std::span<const Point2> points);

// One edge "a b" per line; blank lines and '#' comments are skipped.
BipartiteGraph read_edge_list(const std::string& path);
BipartiteGraph parse_edge_list(const std::string& text);

Json to_json(const FrequencySet& f);
Json to_json(const CoverReport& c);
Json to_json(const RegularityCertificate& c);
Json to_json(const BsgCertificate& c);
Json to_json(const BsgExtraction& b);
Json to_json(const RegularSubsetReport& r);
Json to_json(const GranuleFamily& f, bool with_trace = true);
Json to_json(const EnergyReport& e);
Json to_json(const DirectionalEnergyCheck& d);
Json to_json(const ProjectionProbe& p);
Json to_json(const ParamSet& p);
Json to_json(const DiagnosticCheck& c);
Json to_json(const InitialDimensionReport& r);
Json to_json(const BootstrapTrace& t);
Json to_json(const FinalBootstrapTrace& t);
Json to_json(const GranuleSearch& g);
Json to_json(const DecompositionResult& r);

// %.17g, the format used for every CSV number.
std::string num(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace torusdec::io

#endif  // TORUSDEC_IO_HPP_
