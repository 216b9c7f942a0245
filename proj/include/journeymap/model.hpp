#pragma once

// Staged-sequence data model: item codes, stages, events, journeys, datasets.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace journey {

/// Questionnaire item codes a..m. Only these 13 values are constructible.
enum class ItemCode : char {
    a = 'a', b = 'b', c = 'c', d = 'd',
    e = 'e', f = 'f', g = 'g', h = 'h',
    i = 'i', j = 'j', k = 'k',
    l = 'l', m = 'm',
};

inline constexpr std::array<ItemCode, 13> kAllItems = {
    ItemCode::a, ItemCode::b, ItemCode::c, ItemCode::d, ItemCode::e, ItemCode::f, ItemCode::g,
    ItemCode::h, ItemCode::i, ItemCode::j, ItemCode::k, ItemCode::l, ItemCode::m};

/// Parses a single-symbol item code. Returns nullopt for anything outside a..m.
std::optional<ItemCode> parse_item(std::string_view symbol);
char to_char(ItemCode item);

enum class StageId : int { st1 = 1, st2 = 2, st3 = 3 };

inline constexpr std::array<StageId, 3> kAllStages = {StageId::st1, StageId::st2, StageId::st3};

std::string_view to_string(StageId stage);
inline constexpr int stage_index(StageId s) { return static_cast<int>(s) - 1; }

/// Stage of an item, or nullopt for the excluded post-purchase items l and m.
std::optional<StageId> stage_of(ItemCode item);

/// Canonical symbol used by every distance computation: a..h unchanged,
/// purchase items i/j collapse to '1', non-purchase k to '0'.
using Symbol = char;
Symbol canonical_symbol(ItemCode item);

/// Human caption for reports and the UI.
std::string_view item_caption(ItemCode item);

inline constexpr std::size_t kMaxPreOutcomeEvents = 10;
inline constexpr std::size_t kMaxJourneyLength = kMaxPreOutcomeEvents + 1;

/// One (touchpoint, action) pair. The stage is derived from the item.
class Event {
public:
    /// Throws Error(InvalidArgument) for l and m, which never form a validated event.
    explicit Event(ItemCode item);

    ItemCode item() const noexcept { return item_; }
    StageId stage() const noexcept { return *stage_of(item_); }
    Symbol symbol() const noexcept { return canonical_symbol(item_); }

    friend bool operator==(const Event&, const Event&) = default;

private:
    ItemCode item_;
};

struct StageProjection {
    StageId stage;
    std::vector<ItemCode> items;
};

/// Ordered events of one respondent. A journey produced by ingestion ends in
/// exactly one st3 event; draft journeys (queries under composition) may have
/// no outcome yet.
class Journey {
public:
    Journey(std::string id, std::vector<Event> events);

    const std::string& id() const noexcept { return id_; }
    std::span<const Event> events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }

    bool has_outcome() const noexcept;
    /// 1 for purchase (i, j), 0 for non-purchase (k), nullopt for drafts.
    std::optional<int> label() const noexcept { return label_; }

    std::vector<ItemCode> items() const;
    /// Canonical symbols of the events of one stage, in journey order.
    std::vector<Symbol> stage_symbols(StageId stage) const;
    /// "c,e,g,i" form.
    std::string to_string() const;
    /// "[c, e, g, 1]" form, as prototypes are usually printed.
    std::string canonical_string() const;

private:
    std::string id_;
    std::vector<Event> events_;
    std::optional<int> label_;
};

StageProjection project(const Journey& journey, StageId stage);

/// Throws Error(MissingOutcome) for journeys without an st3 event.
int outcome_label(const Journey& journey);

/// Validated, immutable collection with unique ids.
class Dataset {
public:
    Dataset() = default;
    /// Throws Error(InvalidArgument) on duplicate ids or journeys without outcome.
    Dataset(std::vector<Journey> journeys, std::string provenance);

    std::span<const Journey> journeys() const noexcept { return journeys_; }
    const Journey& operator[](std::size_t index) const { return journeys_.at(index); }
    std::size_t size() const noexcept { return journeys_.size(); }
    bool empty() const noexcept { return journeys_.empty(); }
    const std::string& provenance() const noexcept { return provenance_; }

    std::optional<std::size_t> find(std::string_view id) const;
    std::vector<int> labels() const;

private:
    std::vector<Journey> journeys_;
    std::string provenance_;
};

}  // namespace journey
