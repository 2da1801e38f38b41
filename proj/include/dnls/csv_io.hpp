// CSV and JSON-sidecar I/O.
//
// Potentials:      header "x,re_q,im_q"
// Scattering data: header "lambda,re_rho,im_rho[,re_alpha,im_alpha,re_beta,im_beta]"
// Values are written with 17 significant digits (%.17g), so rereading is
// bit-exact. Every writer also emits a sidecar "<output stem>.json" with the
// grid parameters, tolerances, and a machine-readable run report.
#pragma once

#include <optional>
#include <string>

#include "dnls/grid.hpp"

// vendor single-header JSON
#include <json.hpp>

namespace dnls {

Potential read_potential_csv(const std::string& path);
void write_potential_csv(const std::string& path, const Potential& p);

ScatteringData read_scattering_csv(const std::string& path);
void write_scattering_csv(const std::string& path, const ScatteringData& d);

// Sidecar path: "foo.csv" -> "foo.json" (otherwise path + ".json").
std::string sidecar_path(const std::string& csv_path);
void write_sidecar(const std::string& csv_path, const nlohmann::json& report);

// Parse "lo:hi:n" into n uniform samples of [lo, hi] (inclusive endpoints).
rvec parse_range(const std::string& spec);

}  // namespace dnls
