#pragma once

#include "onsager/bifurcation.hpp"
#include "onsager/degree_engine.hpp"
#include "onsager/spectral_space.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace onsager {

/// {"n_modes": N, "coeffs": [...], "grid_size": M}
nlohmann::json to_json(const SpectralFn& u);
SpectralFn spectral_fn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Zero& z);
nlohmann::json to_json(const DegreeReport& r);
nlohmann::json to_json(const StabilizationTable& t);
nlohmann::json to_json(const DecompositionReport& r);
nlohmann::json to_json(const HomotopyReport& r);
nlohmann::json to_json(const TrivialStability& s);
nlohmann::json to_json(const Branch& b);
nlohmann::json to_json(const BifurcationDiagram& d);

/// One row per sample: branch,mode,sign,lambda,amplitude,leading,stable.
/// The trivial branch uses branch id "trivial" with zero amplitude.
std::string diagram_to_csv(const BifurcationDiagram& d);

/// lambda on the abscissa, +/- amplitude on the ordinate; solid lines for
/// stable samples, dashed for unstable ones.
std::string diagram_to_svg(const BifurcationDiagram& d);

}  // namespace onsager
