#pragma once

// BRS contract lifecycle and the per-hour market process:
//   DA cleared -> BRS window open -> window closed -> ISO validation
//   -> RT execution claims -> settlement.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "brs/forecast.hpp"
#include "brs/provider_economics.hpp"
#include "brs/vg_economics.hpp"

namespace brs {

inline constexpr std::string_view kPool = "pool";

// --- contracts -------------------------------------------------------------

enum class ContractStatus { Signed, Validated, Rejected, Executed, Released };

std::string_view to_string(ContractStatus s) noexcept;

class BrsContract {
public:
    BrsContract(std::uint64_t id, std::string buyer, std::string seller, int hour, Direction dir,
                double quantity, double premium_price);

    std::uint64_t id() const noexcept { return id_; }
    const std::string& buyer() const noexcept { return buyer_; }
    const std::string& seller() const noexcept { return seller_; }
    int hour() const noexcept { return hour_; }
    Direction direction() const noexcept { return direction_; }
    double quantity() const noexcept { return quantity_; }
    double premium_price() const noexcept { return premium_price_; }
    ContractStatus status() const noexcept { return status_; }
    /// Executed MW; zero unless status is Executed.
    double executed() const noexcept { return executed_; }
    /// Capacity given back at RT close (quantity - executed once claimed).
    double released() const noexcept;
    /// Premium owed for the full signed quantity.
    double premium() const noexcept { return quantity_ * premium_price_; }

    const std::optional<std::string>& buyer_zone() const noexcept { return buyer_zone_; }
    const std::optional<std::string>& seller_zone() const noexcept { return seller_zone_; }
    void set_zones(std::optional<std::string> buyer_zone, std::optional<std::string> seller_zone);

    // Transitions: Signed -> Validated | Rejected; Validated -> Executed | Released.
    void validate();
    void reject();
    void execute(double amount);
    void release();

    bool is_final() const noexcept;

    bool operator==(const BrsContract&) const = default;

private:
    void require(ContractStatus from, std::string_view action) const;

    std::uint64_t id_;
    std::string buyer_;
    std::string seller_;
    int hour_;
    Direction direction_;
    double quantity_;
    double premium_price_;
    ContractStatus status_ = ContractStatus::Signed;
    double executed_ = 0.0;
    std::optional<std::string> buyer_zone_;
    std::optional<std::string> seller_zone_;
};

// --- offers and matching ---------------------------------------------------

struct Offer {
    std::string seller;
    int hour = 0;
    Direction direction = Direction::DownCoversOver;
    double price = 0.0;     ///< $/MW
    double quantity = 0.0;  ///< MW
    std::optional<std::string> zone;

    bool operator==(const Offer&) const = default;
};

struct BookEntry {
    Offer offer;
    double remaining = 0.0;
    std::uint64_t arrival = 0;
};

struct Fill {
    std::size_t book_index = 0;
    double quantity = 0.0;
};

/// Cumulative quantity the buyer wants when the marginal price is `price`.
using DemandAtPrice = std::function<double(double price)>;

/// A matching mechanism maps an ascending-price book and a buyer's demand to fills.
using MatchingRule = std::function<std::vector<Fill>(std::span<const BookEntry>, const DemandAtPrice&)>;

/// Greedy price priority: buy cheapest first while marginal utility covers the
/// price; offers sharing the marginal price level are filled pro rata.
std::vector<Fill> price_priority_matching(std::span<const BookEntry> book,
                                          const DemandAtPrice& demand);

/// Buyer-side inputs for one matching call.
struct BuyerRequest {
    std::string id;
    std::optional<std::string> zone;
    VgSchedule schedule;
    PenaltyFactors penalty;
    ForecastDistribution forecast;
};

// --- zonal prohibition -----------------------------------------------------

/// Pairs of zones between which BRS contracts are forbidden.
struct ZonalRule {
    std::set<std::pair<std::string, std::string>> flagged_boundaries;

    bool forbids(const std::optional<std::string>& a, const std::optional<std::string>& b) const;
    bool operator==(const ZonalRule&) const = default;
};

// --- per-hour market -------------------------------------------------------

enum class Phase { DaCleared, BrsWindowOpen, BrsWindowClosed, Validated, RtClaimed, Settled };

std::string_view to_string(Phase p) noexcept;

enum class PostResult { Accepted, Rejected };

struct ProviderInfo {
    DispatchableUnit unit;
    std::optional<std::string> zone;
};

struct ExecutionClaim {
    double executed_down = 0.0;  ///< MW of downward BRS executed (covers over-generation)
    double executed_up = 0.0;    ///< MW of upward BRS executed (covers under-generation)
    double residual_deviation = 0.0;  ///< claimed output minus modified schedule
};

class HourMarket {
public:
    /// Contract ids are hour * 1000 + sequence, unique across a day.
    explicit HourMarket(int hour, MatchingRule rule = price_priority_matching);

    int hour() const noexcept { return hour_; }
    Phase phase() const noexcept { return phase_; }

    void open_window();
    /// Throws PhaseError outside the window; invalid offers are rejected.
    PostResult post_offer(const Offer& offer);
    /// Offers for one direction in book order (ascending price, then arrival).
    const std::vector<BookEntry>& book(Direction dir) const;

    /// Sign contracts for the buyer in both directions against the open book.
    std::vector<BrsContract> match(const BuyerRequest& buyer);
    void close_window();

    /// Enforce seller headroom and the optional zonal rule. Over-committed
    /// sellers lose their newest contracts first.
    void validate_contracts(const std::map<std::string, ProviderInfo>& providers,
                            const ZonalRule* zonal_rule = nullptr);

    /// Execute the buyer's validated contracts against the near-RT output
    /// `claimed_output`; unused capacity is released.
    ExecutionClaim claim_execution(const std::string& buyer, double claimed_output,
                                   double vg_da_schedule);
    /// RT close: releases every contract not yet claimed.
    void close_rt();
    void mark_settled();

    const std::vector<BrsContract>& contracts() const noexcept { return contracts_; }

private:
    void require_phase(Phase expected, std::string_view action) const;
    void advance(Phase next);

    int hour_;
    Phase phase_ = Phase::DaCleared;
    MatchingRule rule_;
    std::vector<BookEntry> down_book_;
    std::vector<BookEntry> up_book_;
    std::uint64_t arrivals_ = 0;
    std::uint64_t next_id_;
    std::vector<BrsContract> contracts_;
    std::set<std::string> claimed_;
};

// --- schedules -------------------------------------------------------------

struct SchedulePair {
    double vg = 0.0;
    double provider = 0.0;
};

/// Downward execution moves q MW from the provider to the VG schedule; upward
/// execution moves it the other way. The sum is unchanged.
SchedulePair apply_execution(SchedulePair schedules, Direction dir, double executed);

// --- settlement ------------------------------------------------------------

enum class FlowTag { Premium, DaEnergy, BrsEnergyShift, RtImbalance, Penalty };

std::string_view to_string(FlowTag t) noexcept;

struct LedgerEntry {
    int hour = 0;
    std::string payer;
    std::string payee;
    double amount = 0.0;  ///< $, nonnegative
    FlowTag tag = FlowTag::DaEnergy;
    std::optional<std::uint64_t> contract;
};

class SettlementLedger {
public:
    /// Throws InvariantViolation on a self-payment or a negative/non-finite amount.
    /// Zero amounts are dropped.
    void post(LedgerEntry entry);
    void append(const SettlementLedger& other);

    const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
    std::vector<std::string> parties() const;
    /// Net cash received by a party (exact sum, correctly rounded).
    double net(std::string_view party) const;
    double net(std::string_view party, FlowTag tag) const;
    /// Exact sum of every signed posting; zero for any well-formed ledger.
    double grand_total() const;

private:
    std::vector<LedgerEntry> entries_;
};

struct VgOutcome {
    std::string id;
    double da_schedule = 0.0;
    double realized = 0.0;
};

struct UnitOutcome {
    std::string id;
    DispatchableUnit unit;
    std::optional<double> rt_output;  ///< observed RT output; unset -> rt_dispatch

    double rt_actual(double rt_price) const {
        return rt_output ? *rt_output : rt_dispatch(unit, rt_price);
    }
};

/// Finalised state of one hour, the sole input of settlement.
struct HourOutcome {
    int hour = 0;
    double da_price = 0.0;
    double rt_price = 0.0;
    PenaltyFactors penalty;
    std::vector<VgOutcome> producers;
    std::vector<UnitOutcome> units;
    std::vector<BrsContract> contracts;
};

/// Modified DA schedules after all executions, keyed by party id.
std::map<std::string, double> modified_schedules(const HourOutcome& hour);

/// Throws LifecycleError if any contract is still Signed or Validated.
SettlementLedger settle(const HourOutcome& hour);

}  // namespace brs
