#include "playerkern/match_data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

constexpr std::string_view kHeader =
    "match_id,date,competition,team1,team2,home,lineup1,lineup2,outcome";
constexpr char kLineupSeparator = ';';

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<PlayerId> split_lineup(std::string_view text) {
  std::vector<PlayerId> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(kLineupSeparator, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_lineup(const std::vector<PlayerId>& lineup) {
  std::string out;
  for (std::size_t i = 0; i < lineup.size(); ++i) {
    if (i) out.push_back(kLineupSeparator);
    out += lineup[i];
  }
  return out;
}

char home_token(HomeSide h) {
  switch (h) {
    case HomeSide::kTeam1: return '1';
    case HomeSide::kTeam2: return '2';
    case HomeSide::kNeutral: break;
  }
  return '0';
}

std::optional<HomeSide> parse_home_token(std::string_view t) {
  if (t == "1") return HomeSide::kTeam1;
  if (t == "2") return HomeSide::kTeam2;
  if (t == "0") return HomeSide::kNeutral;
  return std::nullopt;
}

bool record_less(const MatchRecord& a, const MatchRecord& b) {
  if (a.date != b.date) return a.date < b.date;
  return a.match_id < b.match_id;
}

}  // namespace

char outcome_token(Outcome y) {
  switch (y) {
    case Outcome::kTeam1Win: return 'W';
    case Outcome::kDraw: return 'D';
    case Outcome::kTeam2Win: return 'L';
  }
  return '?';
}

std::optional<Outcome> parse_outcome_token(std::string_view token) {
  if (token == "W") return Outcome::kTeam1Win;
  if (token == "D") return Outcome::kDraw;
  if (token == "L") return Outcome::kTeam2Win;
  return std::nullopt;
}

Outcome flipped(Outcome y) {
  switch (y) {
    case Outcome::kTeam1Win: return Outcome::kTeam2Win;
    case Outcome::kTeam2Win: return Outcome::kTeam1Win;
    case Outcome::kDraw: break;
  }
  return Outcome::kDraw;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    const auto* first = text.data() + pos;
    const auto* last = first + len;
    if (!std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
    std::from_chars(first, last, v);
    return v;
  };
  const auto y = number(0, 4);
  const auto m = number(5, 2);
  const auto d = number(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

void validate_record(const MatchRecord& rec) {
  const auto where = [&] { return "match '" + rec.match_id + "': "; };
  if (rec.match_id.empty()) throw DataError("empty match_id");
  if (rec.team1 == rec.team2) throw DataError(where() + "team1 and team2 are both '" + rec.team1 + "'");
  for (const auto* lineup : {&rec.lineup1, &rec.lineup2}) {
    if (lineup->size() != kLineupSize) {
      throw DataError(where() + "lineup has " + std::to_string(lineup->size()) +
                      " players, expected " + std::to_string(kLineupSize));
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto* lineup : {&rec.lineup1, &rec.lineup2}) {
    for (const auto& p : *lineup) {
      if (p.empty()) throw DataError(where() + "empty player id");
      if (p.find_first_of(",;\"\n\r") != std::string::npos) {
        throw DataError(where() + "player id '" + p + "' contains a separator character");
      }
      if (!seen.insert(p).second) {
        throw DataError(where() + "player '" + p + "' appears more than once across the two lineups");
      }
    }
  }
}

PlayerRegistry::PlayerRegistry(std::vector<PlayerId> ids) {
  for (auto& id : ids) {
    if (find(id)) throw DataError("duplicate player id '" + id + "' in registry");
    intern(id);
  }
}

PlayerIndex PlayerRegistry::intern(const PlayerId& id) {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  const auto idx = static_cast<PlayerIndex>(ids_.size());
  ids_.push_back(id);
  index_.emplace(id, idx);
  return idx;
}

std::optional<PlayerIndex> PlayerRegistry::find(std::string_view id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

Dataset Dataset::from_records(std::vector<MatchRecord> records) {
  std::unordered_set<std::string_view> ids;
  for (const auto& rec : records) {
    validate_record(rec);
    if (!ids.insert(rec.match_id).second) throw DataError("duplicate match_id '" + rec.match_id + "'");
  }
  std::sort(records.begin(), records.end(), record_less);
  auto registry = std::make_shared<PlayerRegistry>();
  for (const auto& rec : records) {
    for (const auto& p : rec.lineup1) registry->intern(p);
    for (const auto& p : rec.lineup2) registry->intern(p);
  }
  return Dataset(std::move(records), std::move(registry));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
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
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("line 1: missing header row");
  ++line_no;
  std::string_view header = trim_cr(line);
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header != kHeader) {
    throw DataError("line 1: unexpected header, expected '" + std::string(kHeader) + "'");
  }

  std::vector<MatchRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim_cr(line);
    if (text.empty()) continue;
    const auto at = [&] { return "line " + std::to_string(line_no) + ": "; };
    std::vector<std::string> f;
    try {
      f = split_csv_line(text);
    } catch (const DataError& e) {
      throw DataError(at() + e.what());
    }
    if (f.size() != 9) {
      throw DataError(at() + "expected 9 fields, found " + std::to_string(f.size()));
    }
    MatchRecord rec;
    rec.match_id = f[0];
    const auto date = parse_date(f[1]);
    if (!date) throw DataError(at() + "invalid date '" + f[1] + "'");
    rec.date = *date;
    rec.competition = f[2];
    rec.team1 = f[3];
    rec.team2 = f[4];
    const auto home = parse_home_token(f[5]);
    if (!home) throw DataError(at() + "invalid home token '" + f[5] + "'");
    rec.home = *home;
    rec.lineup1 = split_lineup(f[6]);
    rec.lineup2 = split_lineup(f[7]);
    const auto outcome = parse_outcome_token(f[8]);
    if (!outcome) throw DataError(at() + "unknown outcome token '" + f[8] + "'");
    rec.outcome = *outcome;
    try {
      validate_record(rec);
    } catch (const DataError& e) {
      throw DataError(at() + e.what());
    }
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw DataError("read failure after line " + std::to_string(line_no));
  return Dataset::from_records(std::move(records));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return parse_dataset(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  out << kHeader << '\n';
  for (const auto& r : ds.records()) {
    out << csv_escape(r.match_id) << ',' << format_date(r.date) << ',' << csv_escape(r.competition)
        << ',' << csv_escape(r.team1) << ',' << csv_escape(r.team2) << ',' << home_token(r.home)
        << ',' << join_lineup(r.lineup1) << ',' << join_lineup(r.lineup2) << ','
        << outcome_token(r.outcome) << '\n';
  }
}

std::pair<Dataset, Dataset> split_by_cutoff(const Dataset& ds, Date cutoff) {
  std::vector<MatchRecord> train;
  std::vector<MatchRecord> test;
  for (const auto& r : ds.records()) {
    (r.date < cutoff ? train : test).push_back(r);
  }
  return {Dataset(std::move(train), ds.registry_), Dataset(std::move(test), ds.registry_)};
}

}  // namespace playerkern
