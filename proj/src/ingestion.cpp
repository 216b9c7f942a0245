#include "journeymap/ingestion.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "journeymap/error.hpp"

namespace journey {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void malformed(std::size_t row, const std::string& cause) {
    throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + cause);
}

RawRecord parse_csv_row(std::string_view line, std::size_t row) {
    RawRecord rec;
    std::size_t start = 0;
    bool first = true;
    while (true) {
        const auto comma = line.find(',', start);
        const auto field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (field.empty()) malformed(row, first ? "missing id" : "empty item field");
        if (first) {
            rec.id = std::string(field);
            first = false;
        } else {
            rec.items.emplace_back(field);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (rec.items.empty()) malformed(row, "record '" + rec.id + "' has no items");
    return rec;
}

RawRecord parse_jsonl_row(std::string_view line, std::size_t row) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        malformed(row, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(row, "expected a JSON object");
    const auto id = obj.find("id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
        malformed(row, "missing string field 'id'");
    }
    const auto items = obj.find("items");
    if (items == obj.end() || !items->is_array()) malformed(row, "missing array field 'items'");
    RawRecord rec;
    rec.id = id->get<std::string>();
    for (const auto& item : *items) {
        if (!item.is_string()) malformed(row, "items must be strings");
        rec.items.push_back(item.get<std::string>());
    }
    if (rec.items.empty()) malformed(row, "record '" + rec.id + "' has no items");
    return rec;
}

ValidationResult validate_impl(const RawRecord& record, bool require_outcome) {
    std::vector<Event> events;
    std::optional<StageId> previous;
    bool outcome_seen = false;
    std::size_t pre_outcome = 0;
    for (const auto& symbol : record.items) {
        const auto item = parse_item(symbol);
        if (!item) return RejectReason::UnknownSymbol;
        const auto stage = stage_of(*item);
        if (!stage) return RejectReason::PostPurchaseItem;
        if (outcome_seen) return RejectReason::EventAfterOutcome;
        if (*stage != StageId::st3 && pre_outcome == kMaxPreOutcomeEvents) return RejectReason::TooLong;
        if (!legal_next(previous, *stage)) return RejectReason::IllegalTransition;
        if (*stage == StageId::st3) {
            outcome_seen = true;
        } else {
            ++pre_outcome;
        }
        events.emplace_back(*item);
        previous = stage;
    }
    if (require_outcome && !outcome_seen) return RejectReason::NoOutcome;
    if (events.empty()) return RejectReason::NoOutcome;
    return Journey(record.id, std::move(events));
}

CleanseResult cleanse_impl(const std::vector<RawRecord>& records, std::string provenance) {
    CleansingReport report;
    std::vector<Journey> accepted;
    for (const auto& rec : records) {
        auto result = validate(rec);
        if (auto* j = std::get_if<Journey>(&result)) {
            accepted.push_back(std::move(*j));
        } else {
            report.rejected.push_back({rec.id, std::get<RejectReason>(result)});
        }
    }
    report.accepted = accepted.size();
    return {Dataset(std::move(accepted), std::move(provenance)), std::move(report)};
}

}  // namespace

InputFormat parse_format(std::string_view name) {
    if (name == "csv") return InputFormat::csv;
    if (name == "jsonl") return InputFormat::jsonl;
    throw Error(ErrorCode::InvalidArgument, "unknown input format '" + std::string(name) + "'");
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::UnknownSymbol: return "UnknownSymbol";
        case RejectReason::NoOutcome: return "NoOutcome";
        case RejectReason::EventAfterOutcome: return "EventAfterOutcome";
        case RejectReason::IllegalTransition: return "IllegalTransition";
        case RejectReason::PostPurchaseItem: return "PostPurchaseItem";
        case RejectReason::TooLong: return "TooLong";
    }
    return "Unknown";
}

std::map<RejectReason, std::size_t> CleansingReport::histogram() const {
    std::map<RejectReason, std::size_t> out;
    for (auto reason : kAllRejectReasons) out[reason] = 0;
    for (const auto& r : rejected) ++out[r.reason];
    return out;
}

std::vector<RawRecord> load(std::istream& in, InputFormat format) {
    std::vector<RawRecord> records;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto rec = format == InputFormat::csv ? parse_csv_row(line, row) : parse_jsonl_row(line, row);
        if (!ids.insert(rec.id).second) malformed(row, "duplicate id '" + rec.id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> load_file(const std::string& path, InputFormat format) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open input '" + path + "'");
    return load(in, format);
}

bool legal_transition(StageId from, [[maybe_unused]] StageId to) {
    switch (from) {
        case StageId::st1:
        case StageId::st2: return true;
        case StageId::st3: return false;
    }
    return false;
}

bool legal_next(std::optional<StageId> last, StageId next) {
    if (!last) return next == StageId::st1;
    return legal_transition(*last, next);
}

RawRecord literal_record(std::string id, const std::vector<std::string>& symbols) {
    RawRecord rec{std::move(id), {}};
    for (const auto& s : symbols) {
        const auto t = trim(s);
        rec.items.emplace_back(t == "1" ? "i" : t == "0" ? "k" : std::string(t));
    }
    return rec;
}

ValidationResult validate(const RawRecord& record) { return validate_impl(record, true); }

ValidationResult validate_draft(const RawRecord& record) { return validate_impl(record, false); }

CleanseResult cleanse(const std::vector<RawRecord>& records, std::string provenance) {
    auto result = cleanse_impl(records, std::move(provenance));
    if (result.dataset.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no journey passed validation (" +
                                                 std::to_string(result.report.rejected.size()) +
                                                 " rejected)");
    }
    return result;
}

CleanseResult cleanse_allow_empty(const std::vector<RawRecord>& records, std::string provenance) {
    return cleanse_impl(records, std::move(provenance));
}

StageStats describe(const Dataset& dataset) {
    StageStats stats;
    stats.journeys = dataset.size();
    if (dataset.empty()) return stats;
    std::array<std::size_t, 3> totals{};
    for (std::size_t s = 0; s < 3; ++s) {
        stats.lengths[s].min = kMaxJourneyLength;
    }
    for (const auto& j : dataset.journeys()) {
        std::array<std::size_t, 3> per{};
        for (const auto& ev : j.events()) {
            const auto s = stage_index(ev.stage());
            ++per[s];
            ++stats.frequencies[s][ev.item()];
        }
        for (std::size_t s = 0; s < 3; ++s) {
            totals[s] += per[s];
            stats.lengths[s].min = std::min(stats.lengths[s].min, per[s]);
            stats.lengths[s].max = std::max(stats.lengths[s].max, per[s]);
        }
        if (*j.label() == 1) {
            ++stats.purchases;
        } else {
            ++stats.non_purchases;
        }
    }
    for (std::size_t s = 0; s < 3; ++s) {
        stats.lengths[s].mean = static_cast<double>(totals[s]) / static_cast<double>(dataset.size());
    }
    return stats;
}

std::size_t symbol_index(Symbol s) {
    for (std::size_t i = 0; i < kCanonicalSymbols.size(); ++i) {
        if (kCanonicalSymbols[i] == s) return i;
    }
    throw Error(ErrorCode::InvalidArgument, std::string("not a canonical symbol: ") + s);
}

std::size_t CooccurrenceMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
    return sum;
}

CooccurrenceMatrix cooccurrence(const Dataset& dataset) {
    CooccurrenceMatrix m;
    for (const auto& j : dataset.journeys()) {
        const auto events = j.events();
        for (std::size_t i = 1; i < events.size(); ++i) {
            ++m.counts[symbol_index(events[i - 1].symbol())][symbol_index(events[i].symbol())];
        }
    }
    return m;
}

}  // namespace journey
