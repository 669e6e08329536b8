#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scalelaw {

enum class Schedule { cosine, constant, constant_cooldown };
enum class MetricKind { accuracy, recall_at_5, miou, error_rate };
enum class RecordFormat { csv, jsonl };

std::string_view to_string(Schedule schedule);
std::string_view to_string(MetricKind kind);
Schedule parse_schedule(std::string_view text);
MetricKind parse_metric_kind(std::string_view text);

/// A task score in its original orientation (higher-is-better for
/// accuracy-like kinds).
struct MetricValue {
    MetricKind kind = MetricKind::error_rate;
    double value = 0.0;

    friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

/// Error rate in [0, 1]: complement for accuracy, recall@5 and mIoU.
double to_error(const MetricValue& metric);

/// One evaluated checkpoint of one trained model.
struct MeasurementRecord {
    std::string model_id;
    std::string family;
    std::string dataset_id;
    double n_params = 0.0;
    double gflops_per_sample = 0.0;
    double samples_seen = 0.0;
    std::optional<double> compute;  // total GFLOPs, derivable
    Schedule schedule = Schedule::cosine;
    // Warmup samples divided by samples seen at this checkpoint; a value of
    // 1 or more means the checkpoint was taken before warmup finished.
    double warmup_fraction = 0.0;
    std::map<std::string, MetricValue> metrics;

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Parse measurement records. Fails fast on the first bad row; the message
/// names the data row (1-based), the line, and the offending column.
std::vector<MeasurementRecord> parse_records(std::istream& source, RecordFormat format);
std::vector<MeasurementRecord> parse_records(std::string_view text, RecordFormat format);

/// Write records in the CSV schema, one row per (record, task) pair.
/// Reals are printed with 17 significant digits so parsing is lossless.
std::string serialize_records_csv(const std::vector<MeasurementRecord>& records);
std::string serialize_records_jsonl(const std::vector<MeasurementRecord>& records);

/// Throws InputError describing the first violated record invariant.
void validate_record(const MeasurementRecord& record);

inline constexpr double kComputeMismatchTolerance = 0.01;

struct ComputeEstimate {
    double gflops = 0.0;   // value to use downstream
    double derived = 0.0;  // gflops_per_sample * samples_seen
    bool mismatch = false; // supplied compute differs from derived by > 1%
};

ComputeEstimate derive_compute(const MeasurementRecord& record);

struct FilterPolicy {
    double max_samples_seen = 3.07e9;
    std::optional<double> dataset_unique_samples;
    double max_repetition = 3.0;
    bool drop_warmup_const = true;
};

void validate_policy(const FilterPolicy& policy);

enum class DropReason { max_samples_seen, warmup, repetition };
std::string_view to_string(DropReason reason);

struct DroppedRecord {
    std::size_t index = 0;  // position in the filter input
    DropReason reason = DropReason::max_samples_seen;
};

struct FilterOutcome {
    std::vector<std::size_t> kept;  // positions in the filter input, ascending
    std::vector<DroppedRecord> dropped;
};

/// Partition records by the data-hygiene policy. Each dropped record carries
/// the first rule it failed, checked in the order samples cap, warmup,
/// repetition.
FilterOutcome filter_records(const std::vector<MeasurementRecord>& records,
                             const FilterPolicy& policy);

}  // namespace scalelaw
