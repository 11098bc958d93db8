#pragma once

#include "infodiv/divide.hpp"
#include "infodiv/iidca.hpp"
#include "infodiv/pmf.hpp"
#include "infodiv/sid.hpp"
#include "infodiv/spectrum.hpp"
#include "infodiv/uniform.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace infodiv::io {

// Floats are parsed and emitted as long double.
using Json = nlohmann::json;

enum class Precision { extended, binary64 };
// Reads INFODIV_PRECISION ("extended" or "double"); anything else is an error.
Precision precision_from_env();
Real at_boundary(Real x, Precision p);

Json to_json(const prob::Pmf& p, Precision prec = Precision::extended);
prob::Pmf pmf_from_json(const Json& j, Precision prec = Precision::extended);

Json to_json(const spectrum::StepCdf& f, Precision prec = Precision::extended);
spectrum::StepCdf stepcdf_from_json(const Json& j);
void write_csv(std::ostream& out, const spectrum::StepCdf& f);

Json to_json(const divide::CompoundPoissonLaw& law, Precision prec = Precision::extended);
Json to_json(const divide::GeomMap& g);
Json to_json(const divide::DivisionCertificate& c, Precision prec = Precision::extended);
Json to_json(const sid::SnbParams& p);
sid::SnbParams snb_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace infodiv::io
