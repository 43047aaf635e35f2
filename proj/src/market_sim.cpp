#include "brs/market_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brs/errors.hpp"
#include "brs/exact_sum.hpp"

namespace brs {

namespace {

constexpr double kFillEpsilon = 1e-12;
constexpr std::uint64_t kContractsPerHour = 1000;

std::string describe(const BrsContract& c) {
    std::ostringstream os;
    os << "contract " << c.id() << " (" << to_string(c.status()) << ")";
    return os.str();
}

}  // namespace

// --- contracts -------------------------------------------------------------

std::string_view to_string(ContractStatus s) noexcept {
    switch (s) {
        case ContractStatus::Signed: return "signed";
        case ContractStatus::Validated: return "validated";
        case ContractStatus::Rejected: return "rejected";
        case ContractStatus::Executed: return "executed";
        case ContractStatus::Released: return "released";
    }
    return "unknown";
}

BrsContract::BrsContract(std::uint64_t id, std::string buyer, std::string seller, int hour,
                         Direction dir, double quantity, double premium_price)
    : id_(id), buyer_(std::move(buyer)), seller_(std::move(seller)), hour_(hour),
      direction_(dir), quantity_(quantity), premium_price_(premium_price) {
    if (!(quantity > 0.0) || !std::isfinite(quantity)) {
        throw DomainError("contract quantity must be positive");
    }
    if (!(premium_price >= 0.0) || !std::isfinite(premium_price)) {
        throw DomainError("contract premium price must be nonnegative");
    }
    if (buyer_ == seller_) throw DomainError("contract buyer and seller must differ");
}

double BrsContract::released() const noexcept {
    switch (status_) {
        case ContractStatus::Executed: return quantity_ - executed_;
        case ContractStatus::Released: return quantity_;
        default: return 0.0;
    }
}

void BrsContract::set_zones(std::optional<std::string> buyer_zone,
                            std::optional<std::string> seller_zone) {
    buyer_zone_ = std::move(buyer_zone);
    seller_zone_ = std::move(seller_zone);
}

void BrsContract::require(ContractStatus from, std::string_view action) const {
    if (status_ != from) {
        throw LifecycleError("cannot " + std::string(action) + " " + describe(*this));
    }
}

void BrsContract::validate() {
    require(ContractStatus::Signed, "validate");
    status_ = ContractStatus::Validated;
}

void BrsContract::reject() {
    require(ContractStatus::Signed, "reject");
    status_ = ContractStatus::Rejected;
}

void BrsContract::execute(double amount) {
    require(ContractStatus::Validated, "execute");
    if (!(amount >= 0.0 && amount <= quantity_)) {
        std::ostringstream os;
        os << "execution of " << amount << " MW outside [0, " << quantity_ << "] for "
           << describe(*this);
        throw LifecycleError(os.str());
    }
    executed_ = amount;
    status_ = ContractStatus::Executed;
}

void BrsContract::release() {
    require(ContractStatus::Validated, "release");
    status_ = ContractStatus::Released;
}

bool BrsContract::is_final() const noexcept {
    return status_ == ContractStatus::Rejected || status_ == ContractStatus::Executed ||
           status_ == ContractStatus::Released;
}

// --- matching --------------------------------------------------------------

std::vector<Fill> price_priority_matching(std::span<const BookEntry> book,
                                          const DemandAtPrice& demand) {
    std::vector<Fill> fills;
    double bought = 0.0;
    std::size_t i = 0;
    while (i < book.size()) {
        const double price = book[i].offer.price;
        std::size_t end = i;
        double level_total = 0.0;
        while (end < book.size() && book[end].offer.price == price) {
            level_total += book[end].remaining;
            ++end;
        }
        if (level_total <= 0.0) {
            i = end;
            continue;
        }

        const double wanted = demand(price) - bought;
        if (wanted <= kFillEpsilon) break;

        const double take = std::min(wanted, level_total);
        for (std::size_t j = i; j < end; ++j) {
            if (book[j].remaining <= 0.0) continue;
            const double q = take == level_total ? book[j].remaining
                                                 : take * (book[j].remaining / level_total);
            if (q > kFillEpsilon) fills.push_back({j, q});
        }
        bought += take;
        if (take < level_total) break;
        i = end;
    }
    return fills;
}

bool ZonalRule::forbids(const std::optional<std::string>& a,
                        const std::optional<std::string>& b) const {
    if (!a || !b || *a == *b) return false;
    return flagged_boundaries.contains({*a, *b}) || flagged_boundaries.contains({*b, *a});
}

// --- hour market -----------------------------------------------------------

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::DaCleared: return "da_cleared";
        case Phase::BrsWindowOpen: return "brs_window_open";
        case Phase::BrsWindowClosed: return "brs_window_closed";
        case Phase::Validated: return "validated";
        case Phase::RtClaimed: return "rt_claimed";
        case Phase::Settled: return "settled";
    }
    return "unknown";
}

HourMarket::HourMarket(int hour, MatchingRule rule)
    : hour_(hour), rule_(std::move(rule)),
      next_id_(static_cast<std::uint64_t>(hour) * kContractsPerHour + 1) {
    if (hour < 0) throw DomainError("hour index must be nonnegative");
}

void HourMarket::require_phase(Phase expected, std::string_view action) const {
    if (phase_ != expected) {
        std::ostringstream os;
        os << "hour " << hour_ << ": cannot " << action << " in phase " << to_string(phase_)
           << " (requires " << to_string(expected) << ")";
        throw PhaseError(os.str());
    }
}

void HourMarket::advance(Phase next) {
    if (static_cast<int>(next) != static_cast<int>(phase_) + 1) {
        throw PhaseError("hour " + std::to_string(hour_) + ": illegal phase change " +
                         std::string(to_string(phase_)) + " -> " + std::string(to_string(next)));
    }
    phase_ = next;
}

void HourMarket::open_window() {
    require_phase(Phase::DaCleared, "open the BRS window");
    advance(Phase::BrsWindowOpen);
}

PostResult HourMarket::post_offer(const Offer& offer) {
    require_phase(Phase::BrsWindowOpen, "post an offer");
    if (offer.hour != hour_) return PostResult::Rejected;
    if (!(offer.quantity > 0.0) || !std::isfinite(offer.quantity)) return PostResult::Rejected;
    if (!(offer.price >= 0.0) || !std::isfinite(offer.price)) return PostResult::Rejected;

    auto& book = offer.direction == Direction::DownCoversOver ? down_book_ : up_book_;
    BookEntry entry{offer, offer.quantity, arrivals_++};
    auto pos = std::upper_bound(book.begin(), book.end(), entry,
                                [](const BookEntry& a, const BookEntry& b) {
                                    return a.offer.price < b.offer.price;
                                });
    book.insert(pos, std::move(entry));
    return PostResult::Accepted;
}

const std::vector<BookEntry>& HourMarket::book(Direction dir) const {
    return dir == Direction::DownCoversOver ? down_book_ : up_book_;
}

std::vector<BrsContract> HourMarket::match(const BuyerRequest& buyer) {
    require_phase(Phase::BrsWindowOpen, "match offers");
    validate(buyer.penalty);
    validate(buyer.schedule, buyer.forecast.capacity());

    std::vector<BrsContract> signed_now;
    for (Direction dir : {Direction::DownCoversOver, Direction::UpCoversUnder}) {
        auto& book = dir == Direction::DownCoversOver ? down_book_ : up_book_;
        DemandAtPrice demand = [&](double price) {
            return optimal_quantity(buyer.schedule, buyer.penalty, buyer.forecast, dir, price);
        };
        for (const Fill& f : rule_(book, demand)) {
            auto& entry = book.at(f.book_index);
            const double q = std::min(f.quantity, entry.remaining);
            if (!(q > 0.0)) continue;
            entry.remaining -= q;
            if (entry.remaining < kFillEpsilon) entry.remaining = 0.0;
            if (next_id_ % kContractsPerHour == 0) {
                throw DomainError("too many contracts in hour " + std::to_string(hour_));
            }
            BrsContract c(next_id_++, buyer.id, entry.offer.seller, hour_, dir, q,
                          entry.offer.price);
            c.set_zones(buyer.zone, entry.offer.zone);
            signed_now.push_back(c);
            contracts_.push_back(std::move(c));
        }
    }
    return signed_now;
}

void HourMarket::close_window() {
    require_phase(Phase::BrsWindowOpen, "close the BRS window");
    advance(Phase::BrsWindowClosed);
}

void HourMarket::validate_contracts(const std::map<std::string, ProviderInfo>& providers,
                                    const ZonalRule* zonal_rule) {
    require_phase(Phase::BrsWindowClosed, "validate contracts");

    for (auto& c : contracts_) {
        auto it = providers.find(c.seller());
        if (it == providers.end()) {
            c.reject();
            continue;
        }
        if (zonal_rule) {
            const auto& seller_zone = c.seller_zone() ? c.seller_zone() : it->second.zone;
            if (zonal_rule->forbids(c.buyer_zone(), seller_zone)) c.reject();
        }
    }

    // Headroom per seller and direction; newest contracts go first.
    for (const auto& [seller, info] : providers) {
        for (Direction dir : {Direction::DownCoversOver, Direction::UpCoversUnder}) {
            const double room = dir == Direction::UpCoversUnder
                                    ? info.unit.p_max - info.unit.da_schedule
                                    : info.unit.da_schedule - info.unit.p_min;
            std::vector<BrsContract*> live;
            ExactSum committed;
            for (auto& c : contracts_) {
                if (c.seller() == seller && c.direction() == dir &&
                    c.status() == ContractStatus::Signed) {
                    live.push_back(&c);
                    committed.add(c.quantity());
                }
            }
            std::sort(live.begin(), live.end(),
                      [](const BrsContract* a, const BrsContract* b) { return a->id() > b->id(); });
            for (BrsContract* c : live) {
                if (committed.value() <= room) break;
                c->reject();
                committed.add(-c->quantity());
            }
        }
    }

    for (auto& c : contracts_) {
        if (c.status() == ContractStatus::Signed) c.validate();
    }
    advance(Phase::Validated);
}

ExecutionClaim HourMarket::claim_execution(const std::string& buyer, double claimed_output,
                                           double vg_da_schedule) {
    require_phase(Phase::Validated, "claim BRS execution");
    if (!claimed_.insert(buyer).second) {
        throw PhaseError("hour " + std::to_string(hour_) + ": buyer '" + buyer +
                         "' already claimed execution");
    }

    ExecutionClaim claim;
    double modified = vg_da_schedule;
    for (Direction dir : {Direction::DownCoversOver, Direction::UpCoversUnder}) {
        std::vector<BrsContract*> held;
        double total = 0.0;
        for (auto& c : contracts_) {
            if (c.buyer() == buyer && c.direction() == dir &&
                c.status() == ContractStatus::Validated) {
                held.push_back(&c);
                total += c.quantity();
            }
        }
        const double deviation = dir == Direction::DownCoversOver
                                     ? std::max(claimed_output - vg_da_schedule, 0.0)
                                     : std::max(vg_da_schedule - claimed_output, 0.0);
        const double executed = std::min(deviation, total);
        for (BrsContract* c : held) {
            const double share = executed == total ? c->quantity()
                                                   : executed * (c->quantity() / total);
            if (share > 0.0) {
                c->execute(share);
            } else {
                c->release();
            }
        }
        if (dir == Direction::DownCoversOver) {
            claim.executed_down = executed;
            modified += executed;
        } else {
            claim.executed_up = executed;
            modified -= executed;
        }
    }
    claim.residual_deviation = claimed_output - modified;
    return claim;
}

void HourMarket::close_rt() {
    require_phase(Phase::Validated, "close RT");
    for (auto& c : contracts_) {
        if (c.status() == ContractStatus::Validated) c.release();
    }
    advance(Phase::RtClaimed);
}

void HourMarket::mark_settled() {
    require_phase(Phase::RtClaimed, "settle");
    advance(Phase::Settled);
}

// --- schedules -------------------------------------------------------------

SchedulePair apply_execution(SchedulePair schedules, Direction dir, double executed) {
    if (!(executed >= 0.0)) throw DomainError("executed BRS must be nonnegative");
    if (dir == Direction::DownCoversOver) {
        schedules.vg += executed;
        schedules.provider -= executed;
    } else {
        schedules.vg -= executed;
        schedules.provider += executed;
    }
    return schedules;
}

// --- settlement ------------------------------------------------------------

std::string_view to_string(FlowTag t) noexcept {
    switch (t) {
        case FlowTag::Premium: return "premium";
        case FlowTag::DaEnergy: return "da_energy";
        case FlowTag::BrsEnergyShift: return "brs_energy_shift";
        case FlowTag::RtImbalance: return "rt_imbalance";
        case FlowTag::Penalty: return "penalty";
    }
    return "unknown";
}

void SettlementLedger::post(LedgerEntry entry) {
    if (entry.payer == entry.payee) {
        throw InvariantViolation("distinct-parties", "self-payment by '" + entry.payer + "'");
    }
    if (!(entry.amount >= 0.0) || !std::isfinite(entry.amount)) {
        std::ostringstream os;
        os << "amount " << entry.amount << " from '" << entry.payer << "' to '" << entry.payee
           << "'";
        throw InvariantViolation("nonnegative-amount", os.str());
    }
    if (entry.amount == 0.0) return;
    entries_.push_back(std::move(entry));
}

void SettlementLedger::append(const SettlementLedger& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

std::vector<std::string> SettlementLedger::parties() const {
    std::set<std::string> names;
    for (const auto& e : entries_) {
        names.insert(e.payer);
        names.insert(e.payee);
    }
    return {names.begin(), names.end()};
}

double SettlementLedger::net(std::string_view party) const {
    ExactSum acc;
    for (const auto& e : entries_) {
        if (e.payee == party) acc.add(e.amount);
        if (e.payer == party) acc.add(-e.amount);
    }
    return acc.value();
}

double SettlementLedger::net(std::string_view party, FlowTag tag) const {
    ExactSum acc;
    for (const auto& e : entries_) {
        if (e.tag != tag) continue;
        if (e.payee == party) acc.add(e.amount);
        if (e.payer == party) acc.add(-e.amount);
    }
    return acc.value();
}

double SettlementLedger::grand_total() const {
    ExactSum acc;
    for (const auto& e : entries_) {
        acc.add(e.amount);
        acc.add(-e.amount);
    }
    return acc.value();
}

std::map<std::string, double> modified_schedules(const HourOutcome& hour) {
    std::map<std::string, double> schedules;
    for (const auto& vg : hour.producers) schedules[vg.id] = vg.da_schedule;
    for (const auto& u : hour.units) schedules[u.id] = u.unit.da_schedule;

    for (const auto& c : hour.contracts) {
        if (c.status() != ContractStatus::Executed) continue;
        auto buyer = schedules.find(c.buyer());
        auto seller = schedules.find(c.seller());
        if (buyer == schedules.end() || seller == schedules.end()) {
            throw DomainError("executed " + describe(c) + " references an unknown party");
        }
        const auto moved = apply_execution({buyer->second, seller->second}, c.direction(),
                                           c.executed());
        buyer->second = moved.vg;
        seller->second = moved.provider;
    }
    return schedules;
}

SettlementLedger settle(const HourOutcome& hour) {
    for (const auto& c : hour.contracts) {
        if (c.status() == ContractStatus::Signed || c.status() == ContractStatus::Validated) {
            throw LifecycleError("cannot settle hour " + std::to_string(hour.hour) + ": " +
                                 describe(c) + " is not final");
        }
    }

    const std::string pool(kPool);
    const double da = hour.da_price;
    const double rt = hour.rt_price;
    SettlementLedger ledger;

    auto pay = [&](const std::string& from, const std::string& to, double signed_amount,
                   FlowTag tag, std::optional<std::uint64_t> contract = std::nullopt) {
        // Positive amounts flow from -> to; negative ones reverse direction.
        if (signed_amount >= 0.0) {
            ledger.post({hour.hour, from, to, signed_amount, tag, contract});
        } else {
            ledger.post({hour.hour, to, from, -signed_amount, tag, contract});
        }
    };

    // (a) premiums on the full signed quantity, released capacity included.
    for (const auto& c : hour.contracts) {
        if (c.status() == ContractStatus::Rejected) continue;
        pay(c.buyer(), c.seller(), c.premium(), FlowTag::Premium, c.id());
    }

    // (b) DA energy on the original schedules.
    for (const auto& vg : hour.producers) pay(pool, vg.id, da * vg.da_schedule, FlowTag::DaEnergy);
    for (const auto& u : hour.units) pay(pool, u.id, da * u.unit.da_schedule, FlowTag::DaEnergy);

    // (c) executed BRS shifts DA energy between the parties.
    for (const auto& c : hour.contracts) {
        if (c.status() != ContractStatus::Executed) continue;
        const double value = da * c.executed();
        if (c.direction() == Direction::DownCoversOver) {
            pay(c.seller(), c.buyer(), value, FlowTag::BrsEnergyShift, c.id());
        } else {
            pay(c.buyer(), c.seller(), value, FlowTag::BrsEnergyShift, c.id());
        }
    }

    const auto schedules = modified_schedules(hour);

    // (d) VG residual deviation: energy at lambda_D plus the penalty margin.
    for (const auto& vg : hour.producers) {
        const double deviation = vg.realized - schedules.at(vg.id);
        pay(pool, vg.id, da * deviation, FlowTag::RtImbalance);
        const double alpha = deviation > 0.0 ? hour.penalty.over : hour.penalty.under;
        pay(vg.id, pool, alpha * da * std::abs(deviation), FlowTag::Penalty);
    }

    // (e) unit deviation from its modified schedule at lambda_R.
    for (const auto& u : hour.units) {
        const double deviation = u.rt_actual(rt) - schedules.at(u.id);
        pay(pool, u.id, rt * deviation, FlowTag::RtImbalance);
    }

    return ledger;
}

}  // namespace brs
