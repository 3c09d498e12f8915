#pragma once

#include "ffp/environments.hpp"
#include "ffp/game.hpp"
#include "ffp/posg.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>

namespace ffp {

/// Malformed document (missing field, wrong type, inconsistent sizes).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// {"players": N, "actions": [...], "payoffs": [[flat tensor of player 0], ...]}
/// Tensors are row-major with the last player's action varying fastest.
nlohmann::json to_json(const NormalFormGame& game);
NormalFormGame game_from_json(const nlohmann::json& doc);

/// Game fields per state under "states", plus "transition" as [s, joint, s']
/// triples, "gamma", "initial" and optionally "signals" ([state][player]) with
/// "num_signals".
nlohmann::json to_json(const Posg& posg);
Posg posg_from_json(const nlohmann::json& doc);

/// Every field optional; missing ones keep their defaults. Cells are
/// [row, col]; poses are {"cell": [row, col], "heading": h}.
nlohmann::json to_json(const BoxPushingConfig& config);
BoxPushingConfig box_config_from_json(const nlohmann::json& doc);

/// Reads and parses a JSON file; throws std::ios_base::failure when unreadable.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ffp
