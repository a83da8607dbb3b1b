#include "snn/io.hpp"

#include <cinttypes>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "snn/errors.hpp"

namespace snn {

using nlohmann::json;

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_instance(const Instance& inst, const std::string& path,
                   const std::string& meta_json) {
    inst.validate();
    std::ostringstream out;
    out << "{\n  \"F\": [\n";
    for (int i = 0; i < inst.n(); ++i) {
        out << "    [";
        for (int j = 0; j < inst.m(); ++j) {
            if (j) out << ", ";
            out << format_g17(inst.F(i, j));
        }
        out << (i + 1 < inst.n() ? "],\n" : "]\n");
    }
    out << "  ],\n  \"x\": [";
    for (int j = 0; j < inst.m(); ++j) {
        if (j) out << ", ";
        out << format_g17(inst.x[j]);
    }
    out << "]";
    if (!meta_json.empty()) out << ",\n  \"meta\": " << meta_json;
    out << "\n}\n";
    write_text_file(path, out.str());
}

Instance load_instance(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    if (!doc.contains("F") || !doc.contains("x"))
        throw IoError(path + ": instance file needs fields F and x");
    const auto& rows = doc["F"];
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw IoError(path + ": empty F");
    const int m = static_cast<int>(rows[0].size());
    Instance inst;
    inst.F.resize(n, m);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != m)
            throw IoError(path + ": ragged rows in F");
        for (int j = 0; j < m; ++j) inst.F(i, j) = rows[i][j].get<double>();
    }
    const auto& xs = doc["x"];
    if (static_cast<int>(xs.size()) != m)
        throw IoError(path + ": x length does not match F columns");
    inst.x.resize(m);
    for (int j = 0; j < m; ++j) inst.x[j] = xs[j].get<double>();
    inst.validate();
    return inst;
}

namespace {

std::string mode_name(SpikeMode mode) {
    return mode == SpikeMode::Signed ? "signed" : "nonneg";
}

SpikeMode mode_from(const std::string& name) {
    if (name == "signed") return SpikeMode::Signed;
    if (name == "nonneg") return SpikeMode::Nonneg;
    throw IoError("unknown spike mode: " + name);
}

std::string cascade_name(CascadePolicy policy) {
    return policy == CascadePolicy::Exhaustive ? "exhaustive" : "once";
}

CascadePolicy cascade_from(const std::string& name) {
    if (name == "exhaustive") return CascadePolicy::Exhaustive;
    if (name == "once") return CascadePolicy::Once;
    throw IoError("unknown cascade policy: " + name);
}

}  // namespace

std::string params_to_json(const SnnParams& params) {
    std::ostringstream out;
    out << "{\n"
        << "  \"tau\": " << format_g17(params.tau) << ",\n"
        << "  \"alpha\": " << format_g17(params.alpha) << ",\n"
        << "  \"eta\": " << format_g17(params.eta) << ",\n"
        << "  \"dt\": " << format_g17(params.dt) << ",\n"
        << "  \"mode\": \"" << mode_name(params.mode) << "\",\n"
        << "  \"cascade\": \"" << cascade_name(params.cascade) << "\",\n"
        << "  \"t_max\": " << params.t_max << "\n"
        << "}\n";
    return out.str();
}

SnnParams params_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("cannot parse params: ") + e.what());
    }
    SnnParams params;
    params.tau = doc.at("tau").get<double>();
    params.alpha = doc.at("alpha").get<double>();
    params.eta = doc.at("eta").get<double>();
    params.dt = doc.at("dt").get<double>();
    params.mode = mode_from(doc.at("mode").get<std::string>());
    params.cascade = cascade_from(doc.at("cascade").get<std::string>());
    params.t_max = doc.at("t_max").get<std::int64_t>();
    params.validate();
    return params;
}

void save_params(const SnnParams& params, const std::string& path) {
    write_text_file(path, params_to_json(params));
}

SnnParams load_params(const std::string& path) {
    return params_from_json(read_text_file(path));
}

std::string kind_to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Nnls: return "nnls";
        case ProblemKind::L1MinNonneg: return "l1";
        case ProblemKind::L1MinSigned: return "l1signed";
        case ProblemKind::LassoNonneg: return "lasso";
    }
    throw ConfigError("unknown problem kind");
}

ProblemKind kind_from_string(const std::string& name) {
    if (name == "nnls") return ProblemKind::Nnls;
    if (name == "l1") return ProblemKind::L1MinNonneg;
    if (name == "l1signed") return ProblemKind::L1MinSigned;
    if (name == "lasso") return ProblemKind::LassoNonneg;
    throw ConfigError("unknown problem kind: " + name);
}

TraceWriter::TraceWriter(const std::string& path) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw IoError("cannot open " + path + " for writing");
    std::fputs(kTraceHeader, file_);
    std::fputc('\n', file_);
    std::fflush(file_);
}

TraceWriter::~TraceWriter() {
    if (file_) std::fclose(file_);
}

std::string trace_row_to_csv(const TraceRow& row) {
    std::ostringstream out;
    out << row.step << ',' << format_g17(row.time) << ','
        << format_g17(row.residual_l2) << ',' << format_g17(row.l1_rate) << ','
        << format_g17(row.cum_spikes) << ',' << format_g17(row.pinv_norm_v) << ','
        << format_g17(row.dual_violation) << ','
        << format_g17(row.conservation_defect);
    return out.str();
}

void TraceWriter::write(const TraceRow& row) {
    const std::string line = trace_row_to_csv(row);
    std::fputs(line.c_str(), file_);
    std::fputc('\n', file_);
    std::fflush(file_);
}

std::vector<TraceRow> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty trace");
    if (line != kTraceHeader)
        throw IncompatibleTrace(path + ": unexpected header: " + line);
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceRow row;
        double step_val = 0.0;
        const int got = std::sscanf(
            line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &step_val, &row.time,
            &row.residual_l2, &row.l1_rate, &row.cum_spikes, &row.pinv_norm_v,
            &row.dual_violation, &row.conservation_defect);
        if (got != 8) throw IncompatibleTrace(path + ": malformed row: " + line);
        row.step = static_cast<std::int64_t>(step_val);
        rows.push_back(row);
    }
    return rows;
}

namespace {

json int_array(const std::vector<int>& values) {
    json arr = json::array();
    for (int v : values) arr.push_back(v);
    return arr;
}

}  // namespace

std::string niceness_to_json(const NicenessReport& report) {
    json doc;
    doc["gamma"] = report.gamma;
    doc["gamma_nondegen"] = report.gamma_nondegen;
    doc["gamma_vertex"] = report.gamma_vertex;
    doc["gamma_coeff"] = report.gamma_coeff;
    doc["enumerated_systems"] = report.enumerated_systems;
    doc["degenerate_subset"] = report.degenerate_subset;
    doc["witness_nondegen"] = {{"subset", int_array(report.nondegen_subset)},
                               {"row", report.nondegen_row}};
    doc["witness_vertex"] = {{"subset_a", int_array(report.vertex_subset_a)},
                             {"sign_a", int_array(report.vertex_sign_a)},
                             {"subset_b", int_array(report.vertex_subset_b)},
                             {"sign_b", int_array(report.vertex_sign_b)}};
    doc["witness_coeff"] = {{"subset", int_array(report.coeff_subset)},
                            {"sign", int_array(report.coeff_sign)},
                            {"index", report.coeff_index}};
    return doc.dump(2) + "\n";
}

}  // namespace snn
