#include "permlc/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "permlc/errors.hpp"

namespace permlc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* method_name(Method m) {
    return m == Method::direct ? "direct" : "anneal";
}

namespace {

void append_array(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

}  // namespace

std::string complex_matrix_to_json(const ComplexMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> re, im;
    re.reserve(n * n);
    im.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    std::string out = "{\"n\":" + std::to_string(n) + ",\"re\":";
    append_array(out, re);
    out += ",\"im\":";
    append_array(out, im);
    out += "}";
    return out;
}

std::string matrix_to_json(const HermitianMatrix& m) {
    return complex_matrix_to_json(m.matrix()) + "\n";
}

std::string density_to_json(const DensityModel& d) {
    std::string out = "{\"n\":" + std::to_string(d.size());
    out += ",\"forms\":" + complex_matrix_to_json(d.forms().rows);
    out += ",\"qMatrix\":" + complex_matrix_to_json(d.q_matrix().matrix());
    out += "}\n";
    return out;
}

HermitianMatrix parse_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadInput(std::string("invalid matrix JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("re") || !j.contains("im"))
        throw BadInput("matrix JSON must be an object with fields n, re, im");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        throw BadInput("matrix JSON: n must be a positive integer");
    const std::size_t n = j["n"].get<std::size_t>();
    const auto& re = j["re"];
    const auto& im = j["im"];
    if (!re.is_array() || !im.is_array() || re.size() != n * n || im.size() != n * n)
        throw BadInput("matrix JSON: re and im must be arrays of n^2 numbers");

    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto& vr = re[i * n + k];
            const auto& vi = im[i * n + k];
            if (!vr.is_number() || !vi.is_number())
                throw BadInput("matrix JSON: re and im entries must be numbers");
            m(i, k) = Complex{vr.get<double>(), vi.get<double>()};
        }
    }
    if (!m.all_finite()) throw BadInput("matrix JSON: entries must be finite");
    return HermitianMatrix::from_matrix(std::move(m), 1e-12);
}

HermitianMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadInput("cannot open matrix file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_json(buf.str());
}

void write_matrix_file(const std::string& path, const HermitianMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadInput("cannot open output file: " + path);
    out << matrix_to_json(m);
    if (!out) throw BadInput("failed writing matrix file: " + path);
}

std::string report_to_json(const EstimateReport& report) {
    std::string out = "{\"method\":\"";
    out += method_name(report.method);
    out += "\",\"estimate\":" + format_double(report.estimate);
    out += ",\"stdError\":" + format_double(report.std_error);
    out += ",\"ess\":" + format_double(report.effective_sample_size);
    out += ",\"acceptanceRates\":";
    append_array(out, report.acceptance_rates);
    out += ",\"samplesUsed\":" + std::to_string(report.samples_used);
    out += ",\"seed\":" + std::to_string(report.seed);
    out += ",\"wallClockSeconds\":" + format_double(report.wall_clock_seconds);
    out += ",\"schedule\":";
    append_array(out, report.schedule);
    out += "}\n";
    return out;
}

}  // namespace permlc
