#include "bunchlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace bunchlab {

namespace {

namespace fs = std::filesystem;

void atomic_write_text(const std::string& path, const std::string& text) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move temp file onto " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read from " + path + " failed");
    return buf.str();
}

double finite_number(const nlohmann::json& j, const std::string& who) {
    if (!j.is_number())
        throw ValidationError(who + ": expected a number, got " + j.dump());
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ValidationError(who + ": non-finite number");
    return x;
}

}  // namespace

nlohmann::json matrix_to_json(const CMat& M) {
    nlohmann::json data = nlohmann::json::array();
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            data.push_back({M(i, j).real(), M(i, j).imag()});
    return {{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

CMat matrix_from_json(const nlohmann::json& j, const std::string& who) {
    if (!j.is_object()) throw ValidationError(who + ": matrix payload is not an object");
    for (const char* key : {"rows", "cols", "data"})
        if (!j.contains(key)) throw ValidationError(who + ": missing field '" + key + "'");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw ValidationError(who + ": rows/cols must be integers");
    const Index rows = j["rows"].get<Index>();
    const Index cols = j["cols"].get<Index>();
    if (rows < 0 || cols < 0) throw ValidationError(who + ": negative dimensions");
    const nlohmann::json& data = j["data"];
    if (!data.is_array()) throw ValidationError(who + ": data must be an array");
    if (static_cast<Index>(data.size()) != rows * cols)
        throw ValidationError(who + ": data has " + std::to_string(data.size()) +
                              " entries, expected " + std::to_string(rows * cols));
    CMat M(rows, cols);
    Index flat = 0;
    for (const auto& entry : data) {
        if (!entry.is_array() || entry.size() != 2)
            throw ValidationError(who + ": entry " + std::to_string(flat) +
                                  " is not a [re, im] pair");
        const double re = finite_number(entry[0], who);
        const double im = finite_number(entry[1], who);
        M(flat / cols, flat % cols) = Complex(re, im);
        ++flat;
    }
    return M;
}

void write_matrix(const std::string& path, const CMat& M, const nlohmann::json& metadata) {
    nlohmann::json j = matrix_to_json(M);
    if (!metadata.is_null()) j["metadata"] = metadata;
    write_json_file(path, j);
}

CMat read_matrix(const std::string& path) {
    return matrix_from_json(read_json_file(path), path);
}

nlohmann::json mesh_to_json(const BeamsplitterMesh& mesh) {
    nlohmann::json elements = nlohmann::json::array();
    for (const MeshElement& e : mesh.elements)
        elements.push_back({{"mode", e.mode + 1}, {"theta", e.theta}, {"phi", e.phi}});
    nlohmann::json phases = nlohmann::json::array();
    for (Index i = 0; i < mesh.output_phases.size(); ++i)
        phases.push_back(mesh.output_phases(i));
    return {{"m", mesh.m}, {"elements", std::move(elements)},
            {"output_phases", std::move(phases)}};
}

BeamsplitterMesh mesh_from_json(const nlohmann::json& j, const std::string& who) {
    if (!j.is_object()) throw ValidationError(who + ": mesh payload is not an object");
    for (const char* key : {"m", "elements", "output_phases"})
        if (!j.contains(key)) throw ValidationError(who + ": missing field '" + key + "'");
    if (!j["m"].is_number_integer()) throw ValidationError(who + ": m must be an integer");
    BeamsplitterMesh mesh;
    mesh.m = j["m"].get<Index>();
    if (mesh.m < 1) throw ValidationError(who + ": m must be positive");
    if (!j["elements"].is_array())
        throw ValidationError(who + ": elements must be an array");
    for (const auto& entry : j["elements"]) {
        if (!entry.is_object() || !entry.contains("mode") || !entry.contains("theta") ||
            !entry.contains("phi"))
            throw ValidationError(who + ": element needs mode, theta, phi");
        if (!entry["mode"].is_number_integer())
            throw ValidationError(who + ": element mode must be an integer");
        MeshElement e;
        e.mode = entry["mode"].get<Index>() - 1;
        if (e.mode < 0 || e.mode >= mesh.m - 1)
            throw ValidationError(who + ": element mode out of range");
        e.theta = finite_number(entry["theta"], who);
        e.phi = finite_number(entry["phi"], who);
        mesh.elements.push_back(e);
    }
    if (!j["output_phases"].is_array() ||
        static_cast<Index>(j["output_phases"].size()) != mesh.m)
        throw ValidationError(who + ": output_phases must list one phase per mode");
    mesh.output_phases.resize(mesh.m);
    Index p = 0;
    for (const auto& entry : j["output_phases"])
        mesh.output_phases(p++) = finite_number(entry, who);
    return mesh;
}

void write_mesh(const std::string& path, const BeamsplitterMesh& mesh,
                const nlohmann::json& metadata) {
    nlohmann::json j = mesh_to_json(mesh);
    if (!metadata.is_null()) j["metadata"] = metadata;
    write_json_file(path, j);
}

BeamsplitterMesh read_mesh(const std::string& path) {
    return mesh_from_json(read_json_file(path), path);
}

void write_scan_csv(const std::string& path, const ScanResult& scan) {
    std::string text = "epsilon,p_bunch,ratio,indistinguishability\n";
    for (const ScanRow& row : scan.rows) {
        text += format_double(row.epsilon);
        text += ',';
        text += format_double(row.p_bunch);
        text += ',';
        text += format_double(row.ratio);
        text += ',';
        text += format_double(row.indistinguishability);
        text += '\n';
    }
    text += "#argmax_epsilon=" + format_double(scan.argmax_epsilon) + "\n";
    atomic_write_text(path, text);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
    const std::string text = read_text(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path + ": invalid JSON");
    return j;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace bunchlab
