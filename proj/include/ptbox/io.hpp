#pragma once

#include "ptbox/em_scattering.hpp"
#include "ptbox/kernel_maps.hpp"
#include "ptbox/lineshape.hpp"
#include "ptbox/spectrum.hpp"
#include "ptbox/variational.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <ostream>
#include <string>
#include <vector>

namespace ptbox::io {

using json = nlohmann::ordered_json;

// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double v);

// JSON text with every float printed to 17 significant digits. Non-finite
// floats are written as null.
std::string dump(const json& j, int indent = 2);

json to_json(const Spectrum& spectrum);
json to_json(const em::ResonanceFit& fit);
json to_json(const std::vector<variational::ExtremizationReport>& reports);

// n,m,re,im
void write_gram_csv(std::ostream& os, const Eigen::MatrixXcd& gram);
// k,t2,rL2,rR2,aL2,aR2,pole_flag
void write_sweep_csv(std::ostream& os, const std::vector<em::SweepRow>& rows);
// x,x',re,im
void write_kernel_csv(std::ostream& os, const std::vector<kernel::KernelEvaluation>& rows);
// x, then re/im columns per mode
void write_profile_csv(std::ostream& os, const std::vector<Mode>& modes, const std::vector<double>& grid);

// Writes text to path; throws std::runtime_error naming the path on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace ptbox::io
