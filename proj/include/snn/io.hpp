#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "snn/engine.hpp"
#include "snn/geometry.hpp"
#include "snn/problems.hpp"

namespace snn {

// 17-significant-digit decimal formatting used for every numeric payload we
// write; doubles round-trip exactly through this.
std::string format_g17(double value);

// Instance files: JSON with "F" (n rows of m reals) and "x" (m reals), plus
// an optional "meta" object carried through verbatim.
void save_instance(const Instance& inst, const std::string& path,
                   const std::string& meta_json = "");
Instance load_instance(const std::string& path);

std::string params_to_json(const SnnParams& params);
SnnParams params_from_json(const std::string& text);
void save_params(const SnnParams& params, const std::string& path);
SnnParams load_params(const std::string& path);

std::string kind_to_string(ProblemKind kind);
ProblemKind kind_from_string(const std::string& name);

inline constexpr const char* kTraceHeader =
    "step,time,residual_l2,l1_rate,cum_spikes,pinv_norm_v,dual_violation,"
    "conservation_defect";

// Streaming CSV writer; rows are flushed as they arrive so a failed run
// still leaves a usable partial trace.
class TraceWriter {
public:
    explicit TraceWriter(const std::string& path);
    ~TraceWriter();
    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void write(const TraceRow& row);

private:
    std::FILE* file_ = nullptr;
};

std::string trace_row_to_csv(const TraceRow& row);
std::vector<TraceRow> load_trace(const std::string& path);

std::string niceness_to_json(const NicenessReport& report);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace snn
