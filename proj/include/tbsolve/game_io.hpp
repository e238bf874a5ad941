#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tbsolve/games.hpp"

namespace tbsolve {

// Versioned JSON game format "efgjson/1":
// {
//   "version": "efgjson/1",
//   "name": "...",
//   "treeplex_x": {"num_sequences": n, "infosets":
//       [{"parent": p, "first_seq": f, "last_seq": l}, ...]},
//   "treeplex_y": {...},
//   "payoff_triplets": [[row, col, value], ...]
// }
inline constexpr const char* kGameFormatVersion = "efgjson/1";

namespace detail {

inline nlohmann::ordered_json treeplex_to_json(const Treeplex& tp) {
  nlohmann::ordered_json out;
  out["num_sequences"] = tp.num_sequences();
  auto& infosets = out["infosets"] = nlohmann::ordered_json::array();
  for (const InfosetRecord& rec : tp.infosets())
    infosets.push_back({{"parent", rec.parent},
                        {"first_seq", rec.first_seq},
                        {"last_seq", rec.last_seq}});
  return out;
}

inline Treeplex treeplex_from_json(const nlohmann::json& j, const char* side) {
  std::vector<InfosetRecord> recs;
  if (!j.contains("infosets") || !j["infosets"].is_array())
    throw std::runtime_error(std::string("game file: ") + side +
                             ".infosets missing or not an array");
  for (const auto& rec : j["infosets"])
    recs.push_back({rec.at("parent").get<int>(), rec.at("first_seq").get<int>(),
                    rec.at("last_seq").get<int>()});
  const int n = j.at("num_sequences").get<int>();
  if (auto err = validate_structure(recs, n))
    throw std::runtime_error(std::string("game file: ") + side + ": " + *err);
  Treeplex tp(std::move(recs));
  if (tp.num_sequences() != n)
    throw std::runtime_error(std::string("game file: ") + side +
                             ": num_sequences does not match infoset ranges");
  return tp;
}

}  // namespace detail

inline void save_game(const Game& g, std::ostream& out) {
  nlohmann::ordered_json j;
  j["version"] = kGameFormatVersion;
  j["name"] = g.name;
  j["treeplex_x"] = detail::treeplex_to_json(g.x_treeplex);
  j["treeplex_y"] = detail::treeplex_to_json(g.y_treeplex);
  auto& triplets = j["payoff_triplets"] = nlohmann::ordered_json::array();
  for (const PayoffEntry& e : g.payoff)
    triplets.push_back({e.row, e.col, e.value});
  out << j.dump(2) << '\n';
}

inline void save_game(const Game& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_game(g, out);
}

inline Game load_game(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("game file: ") + e.what());
  }
  if (!j.contains("version") || j["version"] != kGameFormatVersion)
    throw std::runtime_error("game file: unsupported or missing version "
                             "(expected \"efgjson/1\")");
  Game g;
  g.name = j.value("name", "");
  g.x_treeplex = detail::treeplex_from_json(j.at("treeplex_x"), "treeplex_x");
  g.y_treeplex = detail::treeplex_from_json(j.at("treeplex_y"), "treeplex_y");
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& t : j.at("payoff_triplets")) {
    if (!t.is_array() || t.size() != 3)
      throw std::runtime_error("game file: payoff triplet is not [row, col, value]");
    PayoffEntry e{t[0].get<int>(), t[1].get<int>(), t[2].get<double>()};
    if (e.row < 0 || e.row > g.x_treeplex.num_sequences() || e.col < 0 ||
        e.col > g.y_treeplex.num_sequences())
      throw std::runtime_error("game file: payoff triplet (" +
                               std::to_string(e.row) + ", " +
                               std::to_string(e.col) + ") out of range");
    if (!seen.emplace(std::pair{e.row, e.col}, true).second)
      throw std::runtime_error("game file: duplicate payoff triplet (" +
                               std::to_string(e.row) + ", " +
                               std::to_string(e.col) + ")");
    g.payoff.push_back(e);
  }
  std::sort(g.payoff.begin(), g.payoff.end(),
            [](const PayoffEntry& a, const PayoffEntry& b) {
              return std::pair{a.row, a.col} < std::pair{b.row, b.col};
            });
  return g;
}

inline Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  return load_game(in);
}

}  // namespace tbsolve
