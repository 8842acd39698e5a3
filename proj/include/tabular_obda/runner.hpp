// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tabular_obda/pipeline.hpp"
#include "tabular_obda/query_engine.hpp"

namespace obda {

/// Execution modes: the full constraint-driven flow, the constraint-free
/// whole-dataset load, and the no-selection variant that applies every
/// constraint over every source.
enum class RunMode { Enhanced, Baseline, NoSelect };

const char* to_string(RunMode mode);

struct RunConfig {
    std::filesystem::path data_dir;
    std::filesystem::path mapping_path;
    std::filesystem::path metadata_path;
    std::filesystem::path query_path;
    RunMode mode = RunMode::Enhanced;
    std::string db_url;  // empty: <workdir>/tabular_obda.db
    std::filesystem::path workdir;
    int repetitions = 1;
    double index_threshold = 0.1;
    RangePolicy range_policy = RangePolicy::Error;
    bool keep_intermediate = false;
    bool no_fk = false;
    bool no_index = false;
    unsigned jobs = 0;  // 0: available parallelism
    std::string engine = "reference";

    std::optional<std::filesystem::path> out_results;
    std::optional<std::filesystem::path> out_report;
    std::optional<std::filesystem::path> ddl_out;
    std::optional<std::filesystem::path> mapping_out;
    std::optional<std::filesystem::path> dump_constraints;
};

/// Wall time in seconds for each workflow step of one repetition.
struct StepTimes {
    double selection = 0;
    double normalization = 0;
    double preparation = 0;
    double creation_load = 0;
    double mapping_translation = 0;
    double query_execution = 0;
    double total = 0;

    double step_sum() const {
        return selection + normalization + preparation + creation_load + mapping_translation +
               query_execution;
    }
};

struct RunReport {
    RunMode mode = RunMode::Enhanced;
    StepTimes times;  // medians across repetitions
    std::vector<StepTimes> per_repetition;
    std::uint64_t answer_count = 0;
    std::uint64_t bytes_read = 0;
    double residue = 0;  // total minus step sum, measurement overhead
    ResultSet results;
    std::string ddl_text;
    std::string translated_mapping_text;
    std::string results_csv;
    std::vector<Diagnostic> warnings;
};

/// Executes the configured mode end to end, cold: the database is rebuilt
/// from scratch for every repetition. Reported times are medians; raw
/// per-repetition values are retained.
RunReport run(const RunConfig& config);

struct CompareReport {
    RunReport enhanced;
    RunReport baseline;
    RunReport noselect;
};

/// Runs all three modes on the same inputs and asserts answer-count
/// monotonicity (enhanced >= baseline); time ratios are informational.
CompareReport compare_modes(const RunConfig& config);

std::string report_to_json(const RunReport& report);
std::string report_to_table(const RunReport& report);
std::string compare_to_json(const CompareReport& report);

/// CLI exit code for an error category: 2 input, 3 constraint, 4 engine,
/// 5 monotonicity.
int exit_code_for(ErrorKind kind);

}  // namespace obda
