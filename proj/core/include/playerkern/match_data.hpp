#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace playerkern {

inline constexpr std::size_t kLineupSize = 11;

using PlayerId = std::string;
using PlayerIndex = std::uint32_t;
using Date = std::chrono::year_month_day;

enum class Outcome : std::uint8_t { kTeam1Win, kDraw, kTeam2Win };

// Which side hosts the match.
enum class HomeSide : std::uint8_t { kNeutral, kTeam1, kTeam2 };

char outcome_token(Outcome y);
std::optional<Outcome> parse_outcome_token(std::string_view token);
Outcome flipped(Outcome y);

// Strict YYYY-MM-DD; returns nullopt on anything else, including invalid days.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

struct MatchRecord {
  std::string match_id;
  Date date;
  std::string competition;
  std::string team1;
  std::string team2;
  std::vector<PlayerId> lineup1;
  std::vector<PlayerId> lineup2;
  HomeSide home = HomeSide::kNeutral;
  Outcome outcome = Outcome::kDraw;
};

// Throws DataError when a record violates the lineup or team invariants.
void validate_record(const MatchRecord& rec);

// Dense index assignment for player ids, in order of first interning.
class PlayerRegistry {
 public:
  PlayerRegistry() = default;
  explicit PlayerRegistry(std::vector<PlayerId> ids);

  PlayerIndex intern(const PlayerId& id);
  std::optional<PlayerIndex> find(std::string_view id) const;
  const PlayerId& id_at(PlayerIndex index) const { return ids_.at(index); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<PlayerId>& ids() const { return ids_; }

  friend bool operator==(const PlayerRegistry& a, const PlayerRegistry& b) {
    return a.ids_ == b.ids_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<PlayerId> ids_;
  std::unordered_map<PlayerId, PlayerIndex, Hash, std::equal_to<>> index_;
};

// Immutable, date-sorted collection of validated matches. Splits share the
// registry of the dataset they were cut from, so a player's index never
// depends on the cutoff.
class Dataset {
 public:
  Dataset() : registry_(std::make_shared<const PlayerRegistry>()) {}

  // Validates and sorts the records; builds the registry in sorted order.
  static Dataset from_records(std::vector<MatchRecord> records);

  const std::vector<MatchRecord>& records() const { return records_; }
  const PlayerRegistry& registry() const { return *registry_; }
  std::shared_ptr<const PlayerRegistry> shared_registry() const { return registry_; }

  // N
  std::size_t num_matches() const { return records_.size(); }
  // P: size of the (possibly shared) registry.
  std::size_t num_players() const { return registry_->size(); }
  bool empty() const { return records_.empty(); }

 private:
  Dataset(std::vector<MatchRecord> records, std::shared_ptr<const PlayerRegistry> registry)
      : records_(std::move(records)), registry_(std::move(registry)) {}

  friend std::pair<Dataset, Dataset> split_by_cutoff(const Dataset& ds, Date cutoff);

  std::vector<MatchRecord> records_;
  std::shared_ptr<const PlayerRegistry> registry_;
};

// Parses the match CSV (header row required). Errors carry the 1-based line number.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

void write_dataset(std::ostream& out, const Dataset& ds);

// train: date < cutoff; test: date >= cutoff.
std::pair<Dataset, Dataset> split_by_cutoff(const Dataset& ds, Date cutoff);

// Minimal RFC 4180 field splitting, shared by the CSV readers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace playerkern
