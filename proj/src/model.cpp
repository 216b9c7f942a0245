#include "journeymap/model.hpp"

#include <unordered_set>

#include "journeymap/error.hpp"

namespace journey {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::MissingOutcome: return "MissingOutcome";
        case ErrorCode::DegenerateConfig: return "DegenerateConfig";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::InvalidAssignment: return "InvalidAssignment";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::EmptyModel: return "EmptyModel";
        case ErrorCode::SingleClassDataset: return "SingleClassDataset";
        case ErrorCode::NoCandidates: return "NoCandidates";
        case ErrorCode::NotFound: return "NotFound";
    }
    return "Unknown";
}

std::optional<ItemCode> parse_item(std::string_view symbol) {
    if (symbol.size() != 1) return std::nullopt;
    const char ch = symbol.front();
    if (ch < 'a' || ch > 'm') return std::nullopt;
    return static_cast<ItemCode>(ch);
}

char to_char(ItemCode item) { return static_cast<char>(item); }

std::string_view to_string(StageId stage) {
    switch (stage) {
        case StageId::st1: return "st1";
        case StageId::st2: return "st2";
        case StageId::st3: return "st3";
    }
    return "st?";
}

std::optional<StageId> stage_of(ItemCode item) {
    switch (item) {
        case ItemCode::a:
        case ItemCode::b:
        case ItemCode::c:
        case ItemCode::d: return StageId::st1;
        case ItemCode::e:
        case ItemCode::f:
        case ItemCode::g:
        case ItemCode::h: return StageId::st2;
        case ItemCode::i:
        case ItemCode::j:
        case ItemCode::k: return StageId::st3;
        case ItemCode::l:
        case ItemCode::m: return std::nullopt;
    }
    return std::nullopt;
}

Symbol canonical_symbol(ItemCode item) {
    switch (item) {
        case ItemCode::i:
        case ItemCode::j: return '1';
        case ItemCode::k: return '0';
        default: return to_char(item);
    }
}

std::string_view item_caption(ItemCode item) {
    switch (item) {
        case ItemCode::a: return "Knowing the product through TV commercials";
        case ItemCode::b: return "Knowing the product through direct word-of-mouth";
        case ItemCode::c: return "Understanding the product through word-of-mouth on social media";
        case ItemCode::d: return "Knowing the product through other methods";
        case ItemCode::e: return "Comparison and confirmation through websites by searching";
        case ItemCode::f: return "Comparison and confirmation through e-commerce sites";
        case ItemCode::g: return "Comparison and confirmation through stores";
        case ItemCode::h: return "Comparison and confirmation through social media";
        case ItemCode::i: return "Purchase on an e-commerce site";
        case ItemCode::j: return "Purchase in a store";
        case ItemCode::k: return "No purchase";
        case ItemCode::l: return "Writing product reviews on social media";
        case ItemCode::m: return "Other";
    }
    return "";
}

Event::Event(ItemCode item) : item_(item) {
    if (!stage_of(item)) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("item '") + to_char(item) + "' has no analysis stage");
    }
}

Journey::Journey(std::string id, std::vector<Event> events)
    : id_(std::move(id)), events_(std::move(events)) {
    if (events_.empty()) throw Error(ErrorCode::InvalidArgument, "journey '" + id_ + "' is empty");
    for (const auto& ev : events_) {
        if (ev.stage() == StageId::st3) {
            label_ = ev.symbol() == '1' ? 1 : 0;
        }
    }
}

bool Journey::has_outcome() const noexcept { return label_.has_value(); }

std::vector<ItemCode> Journey::items() const {
    std::vector<ItemCode> out;
    out.reserve(events_.size());
    for (const auto& ev : events_) out.push_back(ev.item());
    return out;
}

std::vector<Symbol> Journey::stage_symbols(StageId stage) const {
    std::vector<Symbol> out;
    for (const auto& ev : events_) {
        if (ev.stage() == stage) out.push_back(ev.symbol());
    }
    return out;
}

std::string Journey::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (i) out += ',';
        out += to_char(events_[i].item());
    }
    return out;
}

std::string Journey::canonical_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (i) out += ", ";
        out += events_[i].symbol();
    }
    return out + "]";
}

StageProjection project(const Journey& journey, StageId stage) {
    StageProjection proj{stage, {}};
    for (const auto& ev : journey.events()) {
        if (ev.stage() == stage) proj.items.push_back(ev.item());
    }
    return proj;
}

int outcome_label(const Journey& journey) {
    if (!journey.label()) {
        throw Error(ErrorCode::MissingOutcome, "journey '" + journey.id() + "' has no st3 event");
    }
    return *journey.label();
}

Dataset::Dataset(std::vector<Journey> journeys, std::string provenance)
    : journeys_(std::move(journeys)), provenance_(std::move(provenance)) {
    std::unordered_set<std::string> seen;
    for (const auto& j : journeys_) {
        if (!j.has_outcome()) {
            throw Error(ErrorCode::InvalidArgument, "journey '" + j.id() + "' has no outcome");
        }
        if (!seen.insert(j.id()).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate journey id '" + j.id() + "'");
        }
    }
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
    for (std::size_t i = 0; i < journeys_.size(); ++i) {
        if (journeys_[i].id() == id) return i;
    }
    return std::nullopt;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(journeys_.size());
    for (const auto& j : journeys_) out.push_back(*j.label());
    return out;
}

}  // namespace journey
