#include "scalelaw/records.hpp"

#include "scalelaw/axis.hpp"
#include "scalelaw/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <tuple>

namespace scalelaw {

std::string_view to_string(Axis axis) { return axis == Axis::compute ? "compute" : "samples"; }

Axis parse_axis(std::string_view text) {
    if (text == "compute") return Axis::compute;
    if (text == "samples") return Axis::samples;
    throw InputError(fmt::format("unknown axis '{}' (expected compute or samples)", text));
}

std::string_view to_string(Schedule schedule) {
    switch (schedule) {
        case Schedule::cosine: return "cosine";
        case Schedule::constant: return "const";
        case Schedule::constant_cooldown: return "const_cooldown";
    }
    return "cosine";
}

std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::accuracy: return "accuracy";
        case MetricKind::recall_at_5: return "recall_at_5";
        case MetricKind::miou: return "miou";
        case MetricKind::error_rate: return "error_rate";
    }
    return "error_rate";
}

std::string_view to_string(DropReason reason) {
    switch (reason) {
        case DropReason::max_samples_seen: return "max_samples_seen";
        case DropReason::warmup: return "warmup";
        case DropReason::repetition: return "repetition";
    }
    return "max_samples_seen";
}

Schedule parse_schedule(std::string_view text) {
    if (text == "cosine") return Schedule::cosine;
    if (text == "const") return Schedule::constant;
    if (text == "const_cooldown") return Schedule::constant_cooldown;
    throw InputError(fmt::format("unknown schedule '{}'", text));
}

MetricKind parse_metric_kind(std::string_view text) {
    if (text == "accuracy") return MetricKind::accuracy;
    if (text == "recall_at_5") return MetricKind::recall_at_5;
    if (text == "miou") return MetricKind::miou;
    if (text == "error_rate") return MetricKind::error_rate;
    throw InputError(fmt::format("unknown metric kind '{}'", text));
}

double to_error(const MetricValue& metric) {
    return metric.kind == MetricKind::error_rate ? metric.value : 1.0 - metric.value;
}

void validate_record(const MeasurementRecord& record) {
    if (record.model_id.empty()) throw InputError("model_id must not be empty");
    if (!(record.n_params >= 0.0) || !std::isfinite(record.n_params))
        throw InputError("n_params must be a non-negative count");
    if (!(record.gflops_per_sample > 0.0) || !std::isfinite(record.gflops_per_sample))
        throw InputError("gflops_per_sample must be > 0");
    if (!(record.samples_seen > 0.0) || !std::isfinite(record.samples_seen))
        throw InputError("samples_seen must be > 0");
    if (record.compute && !(*record.compute > 0.0 && std::isfinite(*record.compute)))
        throw InputError("compute must be > 0 when present");
    if (!(record.warmup_fraction >= 0.0) || !std::isfinite(record.warmup_fraction))
        throw InputError("warmup_fraction must be >= 0");
    for (const auto& [task, metric] : record.metrics) {
        if (!(metric.value >= 0.0 && metric.value <= 1.0))
            throw InputError(fmt::format("metric_value for task '{}' must lie in [0, 1]", task));
    }
}

namespace {

constexpr std::array<std::string_view, 12> kColumns = {
    "model_id",  "family",   "dataset_id",      "n_params", "gflops_per_sample", "samples_seen",
    "compute",   "schedule", "warmup_fraction", "task_id",  "metric_kind",       "metric_value"};

enum Column : std::size_t {
    kModelId, kFamily, kDatasetId, kNParams, kGflops, kSamples,
    kCompute, kSchedule, kWarmup, kTaskId, kMetricKind, kMetricValue
};

constexpr std::array<bool, 12> kRequired = {true,  false, false, false, true, true,
                                            false, false, false, true,  true, true};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Comma-separated fields with RFC 4180 quoting.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? current : trim(current));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted) throw InputError(fmt::format("line {}: unterminated quoted field", line_no));
    fields.push_back(was_quoted ? current : trim(current));
    return fields;
}

double parse_real(std::string_view text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end)
        throw InputError(fmt::format("'{}' is not a number", text));
    return value;
}

struct RowContext {
    std::size_t row = 0;
    std::size_t line = 0;
};

[[noreturn]] void fail(const RowContext& ctx, std::string_view column, std::string_view what) {
    throw InputError(
        fmt::format("row {} (line {}), column '{}': {}", ctx.row, ctx.line, column, what));
}

double field_real(const RowContext& ctx, std::string_view column, const std::string& text) {
    try {
        return parse_real(text);
    } catch (const InputError& e) {
        fail(ctx, column, e.what());
    }
}

void check_record(const RowContext& ctx, const MeasurementRecord& r) {
    if (!(r.gflops_per_sample > 0.0) || !std::isfinite(r.gflops_per_sample))
        fail(ctx, "gflops_per_sample", "must be > 0");
    if (!(r.samples_seen > 0.0) || !std::isfinite(r.samples_seen))
        fail(ctx, "samples_seen", "must be > 0");
    if (r.compute && !(*r.compute > 0.0 && std::isfinite(*r.compute)))
        fail(ctx, "compute", "must be > 0 when present");
    if (!(r.n_params >= 0.0) || !std::isfinite(r.n_params)) fail(ctx, "n_params", "must be >= 0");
    if (!(r.warmup_fraction >= 0.0) || !std::isfinite(r.warmup_fraction))
        fail(ctx, "warmup_fraction", "must be >= 0");
}

void check_metric(const RowContext& ctx, const MetricValue& m) {
    if (!(m.value >= 0.0 && m.value <= 1.0))
        fail(ctx, "metric_value", fmt::format("{} is outside [0, 1]", m.value));
}

using RecordKey = std::tuple<std::string, std::string, std::string, double, double, double,
                             double, int, double>;

RecordKey key_of(const MeasurementRecord& r) {
    return {r.model_id,     r.family,
            r.dataset_id,   r.n_params,
            r.gflops_per_sample, r.samples_seen,
            r.compute.value_or(-1.0), static_cast<int>(r.schedule),
            r.warmup_fraction};
}

// Rows sharing every record field belong to the same record; records keep
// the order of their first row.
class RecordAssembler {
public:
    void add(const RowContext& ctx, MeasurementRecord base, const std::string& task,
             MetricValue metric) {
        const auto key = key_of(base);
        auto it = std::find_if(keys_.begin(), keys_.end(),
                               [&](const RecordKey& k) { return k == key; });
        std::size_t slot = 0;
        if (it == keys_.end()) {
            keys_.push_back(key);
            records_.push_back(std::move(base));
            slot = records_.size() - 1;
        } else {
            slot = static_cast<std::size_t>(it - keys_.begin());
        }
        auto [pos, inserted] = records_[slot].metrics.emplace(task, metric);
        if (!inserted) fail(ctx, "task_id", fmt::format("duplicate task '{}' for record", task));
    }

    std::vector<MeasurementRecord> take() { return std::move(records_); }

private:
    std::vector<RecordKey> keys_;
    std::vector<MeasurementRecord> records_;
};

std::vector<MeasurementRecord> parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line, line_no);
            break;
        }
    }
    if (header.empty()) throw InputError("CSV input has no header line");

    std::array<std::optional<std::size_t>, kColumns.size()> index{};
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto it = std::find(kColumns.begin(), kColumns.end(), header[i]);
        if (it != kColumns.end()) index[static_cast<std::size_t>(it - kColumns.begin())] = i;
    }
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (kRequired[c] && !index[c])
            throw InputError(
                fmt::format("line {}: header is missing required column '{}'", line_no, kColumns[c]));
    }

    RecordAssembler assembler;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++row;
        const RowContext ctx{row, line_no};
        const auto fields = split_csv_line(line, line_no);
        auto get = [&](Column c) -> std::optional<std::string> {
            if (!index[c]) return std::nullopt;
            if (*index[c] >= fields.size()) {
                if (kRequired[c]) fail(ctx, kColumns[c], "missing value");
                return std::nullopt;
            }
            const std::string& v = fields[*index[c]];
            if (v.empty()) {
                if (kRequired[c]) fail(ctx, kColumns[c], "missing value");
                return std::nullopt;
            }
            return v;
        };

        MeasurementRecord r;
        r.model_id = *get(kModelId);
        r.family = get(kFamily).value_or("");
        r.dataset_id = get(kDatasetId).value_or("");
        if (auto v = get(kNParams)) r.n_params = field_real(ctx, "n_params", *v);
        r.gflops_per_sample = field_real(ctx, "gflops_per_sample", *get(kGflops));
        r.samples_seen = field_real(ctx, "samples_seen", *get(kSamples));
        if (auto v = get(kCompute)) r.compute = field_real(ctx, "compute", *v);
        if (auto v = get(kSchedule)) {
            try {
                r.schedule = parse_schedule(*v);
            } catch (const InputError& e) {
                fail(ctx, "schedule", e.what());
            }
        }
        if (auto v = get(kWarmup)) r.warmup_fraction = field_real(ctx, "warmup_fraction", *v);
        check_record(ctx, r);

        MetricValue metric;
        try {
            metric.kind = parse_metric_kind(*get(kMetricKind));
        } catch (const InputError& e) {
            fail(ctx, "metric_kind", e.what());
        }
        metric.value = field_real(ctx, "metric_value", *get(kMetricValue));
        check_metric(ctx, metric);
        assembler.add(ctx, std::move(r), *get(kTaskId), metric);
    }
    return assembler.take();
}

std::vector<MeasurementRecord> parse_jsonl(std::istream& in) {
    using nlohmann::json;
    std::vector<MeasurementRecord> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++row;
        const RowContext ctx{row, line_no};
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(fmt::format("row {} (line {}): invalid JSON: {}", row, line_no, e.what()));
        }
        if (!obj.is_object())
            throw InputError(fmt::format("row {} (line {}): expected a JSON object", row, line_no));

        auto need = [&](std::string_view key) -> const json& {
            const auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) fail(ctx, key, "missing value");
            return *it;
        };
        auto real = [&](std::string_view key, const json& v) {
            if (!v.is_number()) fail(ctx, key, "expected a number");
            return v.get<double>();
        };
        auto text = [&](std::string_view key, const json& v) {
            if (!v.is_string()) fail(ctx, key, "expected a string");
            return v.get<std::string>();
        };

        MeasurementRecord r;
        r.model_id = text("model_id", need("model_id"));
        if (obj.contains("family")) r.family = text("family", obj["family"]);
        if (obj.contains("dataset_id")) r.dataset_id = text("dataset_id", obj["dataset_id"]);
        if (obj.contains("n_params") && !obj["n_params"].is_null())
            r.n_params = real("n_params", obj["n_params"]);
        r.gflops_per_sample = real("gflops_per_sample", need("gflops_per_sample"));
        r.samples_seen = real("samples_seen", need("samples_seen"));
        if (obj.contains("compute") && !obj["compute"].is_null())
            r.compute = real("compute", obj["compute"]);
        if (obj.contains("schedule")) {
            try {
                r.schedule = parse_schedule(text("schedule", obj["schedule"]));
            } catch (const InputError& e) {
                fail(ctx, "schedule", e.what());
            }
        }
        if (obj.contains("warmup_fraction"))
            r.warmup_fraction = real("warmup_fraction", obj["warmup_fraction"]);
        check_record(ctx, r);

        const json& metrics = need("metrics");
        if (!metrics.is_object()) fail(ctx, "metrics", "expected an object keyed by task_id");
        for (const auto& [task, entry] : metrics.items()) {
            if (!entry.is_object()) fail(ctx, "metrics", fmt::format("task '{}' is not an object", task));
            MetricValue m;
            try {
                m.kind = parse_metric_kind(text("metric_kind", entry.value("kind", json())));
            } catch (const InputError& e) {
                fail(ctx, "metric_kind", e.what());
            }
            m.value = real("metric_value", entry.value("value", json()));
            check_metric(ctx, m);
            r.metrics.emplace(task, m);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::vector<MeasurementRecord> parse_records(std::istream& source, RecordFormat format) {
    return format == RecordFormat::csv ? parse_csv(source) : parse_jsonl(source);
}

std::vector<MeasurementRecord> parse_records(std::string_view text, RecordFormat format) {
    std::istringstream in{std::string(text)};
    return parse_records(in, format);
}

std::string serialize_records_csv(const std::vector<MeasurementRecord>& records) {
    std::string out;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (c) out += ',';
        out += kColumns[c];
    }
    out += '\n';
    for (const auto& r : records) {
        for (const auto& [task, metric] : r.metrics) {
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", quote_csv(r.model_id),
                               quote_csv(r.family), quote_csv(r.dataset_id),
                               r.n_params > 0.0 ? format_real(r.n_params) : std::string(),
                               format_real(r.gflops_per_sample), format_real(r.samples_seen),
                               r.compute ? format_real(*r.compute) : std::string(),
                               to_string(r.schedule), format_real(r.warmup_fraction),
                               quote_csv(task), to_string(metric.kind), format_real(metric.value));
        }
    }
    return out;
}

std::string serialize_records_jsonl(const std::vector<MeasurementRecord>& records) {
    using nlohmann::json;
    std::string out;
    for (const auto& r : records) {
        json obj = {{"model_id", r.model_id},
                    {"family", r.family},
                    {"dataset_id", r.dataset_id},
                    {"n_params", r.n_params},
                    {"gflops_per_sample", r.gflops_per_sample},
                    {"samples_seen", r.samples_seen},
                    {"compute", r.compute ? json(*r.compute) : json()},
                    {"schedule", to_string(r.schedule)},
                    {"warmup_fraction", r.warmup_fraction}};
        json metrics = json::object();
        for (const auto& [task, m] : r.metrics)
            metrics[task] = {{"kind", to_string(m.kind)}, {"value", m.value}};
        obj["metrics"] = std::move(metrics);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

ComputeEstimate derive_compute(const MeasurementRecord& record) {
    ComputeEstimate est;
    est.derived = record.gflops_per_sample * record.samples_seen;
    if (record.compute) {
        est.gflops = *record.compute;
        est.mismatch =
            std::abs(*record.compute - est.derived) > kComputeMismatchTolerance * est.derived;
    } else {
        est.gflops = est.derived;
    }
    return est;
}

void validate_policy(const FilterPolicy& policy) {
    if (!(policy.max_samples_seen > 0.0)) throw InputError("max_samples_seen must be > 0");
    if (!(policy.max_repetition >= 1.0)) throw InputError("max_repetition must be >= 1");
    if (policy.dataset_unique_samples && !(*policy.dataset_unique_samples > 0.0))
        throw InputError("dataset_unique_samples must be > 0");
}

FilterOutcome filter_records(const std::vector<MeasurementRecord>& records,
                             const FilterPolicy& policy) {
    validate_policy(policy);
    FilterOutcome out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::optional<DropReason> reason;
        if (r.samples_seen > policy.max_samples_seen) {
            reason = DropReason::max_samples_seen;
        } else if (policy.drop_warmup_const && r.schedule == Schedule::constant &&
                   r.warmup_fraction >= 1.0) {
            reason = DropReason::warmup;
        } else if (policy.dataset_unique_samples &&
                   r.samples_seen / *policy.dataset_unique_samples > policy.max_repetition) {
            reason = DropReason::repetition;
        }
        if (reason)
            out.dropped.push_back({i, *reason});
        else
            out.kept.push_back(i);
    }
    return out;
}

}  // namespace scalelaw
