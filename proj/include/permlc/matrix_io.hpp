#pragma once

#include <string>

#include "permlc/complex_matrix.hpp"
#include "permlc/density.hpp"
#include "permlc/estimators.hpp"

namespace permlc {

// Shared matrix JSON format: {"n": n, "re": [...], "im": [...]} with
// row-major n^2 entries. Writers emit 17 significant digits; readers reject
// asymmetry beyond 1e-12 (relative to max(1, |entries|)).

std::string matrix_to_json(const HermitianMatrix& m);
std::string complex_matrix_to_json(const ComplexMatrix& m);  // writer only; L is not Hermitian
HermitianMatrix parse_matrix_json(const std::string& text);

// Density parameters in the shared matrix layout:
// {"n": n, "forms": <matrix>, "qMatrix": <matrix>}.
std::string density_to_json(const DensityModel& d);

HermitianMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const HermitianMatrix& m);

// EstimateReport JSON: {method, estimate, stdError, ess, acceptanceRates[],
// samplesUsed, seed, wallClockSeconds, schedule[]}. Field order fixed,
// numbers at 17 significant digits. wallClockSeconds is emitted as given;
// pass a report with the field zeroed when byte-stable output is required.
std::string report_to_json(const EstimateReport& report);

// 17-significant-digit representation that round-trips doubles exactly.
std::string format_double(double v);

const char* method_name(Method m);

}  // namespace permlc
