#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "journeymap/model.hpp"

namespace journey {

enum class InputFormat { csv, jsonl };

InputFormat parse_format(std::string_view name);

/// Pre-validation form of one survey row.
struct RawRecord {
    std::string id;
    std::vector<std::string> items;
};

enum class RejectReason {
    UnknownSymbol,
    NoOutcome,
    EventAfterOutcome,
    IllegalTransition,
    PostPurchaseItem,
    TooLong,
};

inline constexpr std::array<RejectReason, 6> kAllRejectReasons = {
    RejectReason::UnknownSymbol,     RejectReason::NoOutcome,        RejectReason::EventAfterOutcome,
    RejectReason::IllegalTransition, RejectReason::PostPurchaseItem, RejectReason::TooLong};

std::string_view to_string(RejectReason reason);

struct Rejection {
    std::string id;
    RejectReason reason;
};

struct CleansingReport {
    std::size_t accepted = 0;
    std::vector<Rejection> rejected;

    /// Count per reason code; every code is present, possibly with 0.
    std::map<RejectReason, std::size_t> histogram() const;
};

/// Reads one record per CSV row or JSONL line, preserving order. Blank lines
/// are skipped. Throws Error(MalformedRow) on the first structural problem
/// (missing id, no items, empty field, bad JSON, duplicate id).
std::vector<RawRecord> load(std::istream& in, InputFormat format);
std::vector<RawRecord> load_file(const std::string& path, InputFormat format);

/// Whether a stage may directly follow another. The first event of a journey
/// must be st1, and st3 is terminal.
bool legal_transition(StageId from, StageId to);
/// Successor legality for a draft: `last` is nullopt for an empty draft.
bool legal_next(std::optional<StageId> last, StageId next);

/// Builds a record from a literal sequence typed by a user, where the
/// canonical outcome symbols "1" and "0" stand for items i and k.
RawRecord literal_record(std::string id, const std::vector<std::string>& symbols);

using ValidationResult = std::variant<Journey, RejectReason>;

/// Scans left to right and reports the first violation.
ValidationResult validate(const RawRecord& record);

/// Like validate, but a missing outcome is allowed (journeys under
/// composition, k-NN queries). Every other rule still applies.
ValidationResult validate_draft(const RawRecord& record);

struct CleanseResult {
    Dataset dataset;
    CleansingReport report;
};

/// Throws Error(EmptyDataset) when nothing is accepted.
CleanseResult cleanse(const std::vector<RawRecord>& records, std::string provenance = {});

/// Like cleanse but returns an empty dataset instead of throwing.
CleanseResult cleanse_allow_empty(const std::vector<RawRecord>& records, std::string provenance = {});

struct LengthStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
};

struct StageStats {
    std::size_t journeys = 0;
    /// Item frequency per stage; st3 is keyed by original item (i, j, k).
    std::array<std::map<ItemCode, std::size_t>, 3> frequencies;
    std::array<LengthStats, 3> lengths;
    std::size_t purchases = 0;
    std::size_t non_purchases = 0;
};

StageStats describe(const Dataset& dataset);

/// Canonical symbols indexing the co-occurrence matrix: a..h, "1", "0".
inline constexpr std::array<Symbol, 10> kCanonicalSymbols = {'a', 'b', 'c', 'd', 'e',
                                                             'f', 'g', 'h', '1', '0'};

std::size_t symbol_index(Symbol s);

struct CooccurrenceMatrix {
    /// counts[from][to] over kCanonicalSymbols.
    std::array<std::array<std::size_t, 10>, 10> counts{};

    std::size_t at(Symbol from, Symbol to) const { return counts[symbol_index(from)][symbol_index(to)]; }
    std::size_t total() const;
};

CooccurrenceMatrix cooccurrence(const Dataset& dataset);

}  // namespace journey
