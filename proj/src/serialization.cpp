#include "ffp/serialization.hpp"

#include <fstream>
#include <ios>

namespace ffp {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
    try {
        return doc.at(name).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + name + "': " + e.what());
    }
}

template <typename T>
void optional_field(const json& doc, const char* name, T& out) {
    if (!doc.contains(name)) return;
    try {
        out = doc.at(name).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + name + "': " + e.what());
    }
}

json game_body(const NormalFormGame& game) {
    json payoffs = json::array();
    for (int i = 0; i < game.num_players(); ++i) {
        const auto& r = game.payoffs(i);
        payoffs.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    return {{"players", game.num_players()}, {"actions", game.action_counts()}, {"payoffs", payoffs}};
}

NormalFormGame game_body_from(const json& doc) {
    const auto actions = field<std::vector<int>>(doc, "actions");
    const auto raw = field<std::vector<std::vector<double>>>(doc, "payoffs");
    if (doc.contains("players") && field<int>(doc, "players") != static_cast<int>(actions.size()))
        throw FormatError("'players' disagrees with the length of 'actions'");
    std::vector<Eigen::VectorXd> payoffs;
    for (const auto& r : raw) payoffs.push_back(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    try {
        return NormalFormGame(actions, std::move(payoffs));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

json cell_json(Cell c) { return json::array({c.row, c.col}); }

Cell cell_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw FormatError("cells are [row, col]");
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

json to_json(const NormalFormGame& game) { return game_body(game); }

NormalFormGame game_from_json(const json& doc) { return game_body_from(doc); }

json to_json(const Posg& posg) {
    json states = json::array();
    json transition = json::array();
    for (int s = 0; s < posg.num_states(); ++s) {
        json body = game_body(posg.stage(s));
        body.erase("players");
        states.push_back(std::move(body));
        const auto& row = posg.transitions()[static_cast<std::size_t>(s)];
        for (std::size_t j = 0; j < row.size(); ++j) transition.push_back({s, j, row[j]});
    }
    json doc{{"players", posg.num_players()},
             {"states", states},
             {"transition", transition},
             {"gamma", posg.gamma()},
             {"initial", posg.initial_state()}};
    if (posg.has_signals()) {
        doc["signals"] = posg.signals();
        doc["num_signals"] = posg.num_signals();
    }
    return doc;
}

Posg posg_from_json(const json& doc) {
    const json states = field<json>(doc, "states");
    if (!states.is_array() || states.empty()) throw FormatError("'states' must be a nonempty array");
    std::vector<NormalFormGame> stages;
    for (const auto& s : states) stages.push_back(game_body_from(s));
    if (doc.contains("players"))
        for (const auto& g : stages)
            if (g.num_players() != field<int>(doc, "players")) throw FormatError("stage game player count mismatch");

    std::vector<std::vector<int>> transitions;
    for (const auto& g : stages) transitions.emplace_back(static_cast<std::size_t>(g.num_joint_actions()), -1);
    for (const auto& triple : field<std::vector<std::vector<long>>>(doc, "transition")) {
        if (triple.size() != 3) throw FormatError("transition entries are [state, joint, next]");
        const long s = triple[0], j = triple[1];
        if (s < 0 || s >= static_cast<long>(stages.size()) || j < 0 ||
            j >= static_cast<long>(transitions[static_cast<std::size_t>(s)].size()))
            throw FormatError("transition entry out of range");
        transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = static_cast<int>(triple[2]);
    }
    for (const auto& row : transitions)
        for (int next : row)
            if (next < 0) throw FormatError("transition table is not total");

    std::vector<std::vector<int>> signals;
    int num_signals = 0;
    optional_field(doc, "signals", signals);
    optional_field(doc, "num_signals", num_signals);
    try {
        return Posg(std::move(stages), std::move(transitions), field<double>(doc, "gamma"), field<int>(doc, "initial"),
                    std::move(signals), num_signals);
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

json to_json(const BoxPushingConfig& c) {
    json agents = json::array();
    for (const auto& a : c.agents) agents.push_back({{"cell", cell_json(a.cell)}, {"heading", a.heading}});
    return {{"width", c.width},
            {"height", c.height},
            {"goal_row", c.goal_row},
            {"small_boxes", json::array({cell_json(c.small_boxes[0]), cell_json(c.small_boxes[1])})},
            {"large_box", cell_json(c.large_box)},
            {"agents", agents},
            {"small_box_reward", c.small_box_reward},
            {"large_box_reward", c.large_box_reward},
            {"bump_penalty", c.bump_penalty},
            {"step_cost", c.step_cost},
            {"gamma", c.gamma},
            {"horizon", c.horizon}};
}

BoxPushingConfig box_config_from_json(const json& doc) {
    if (!doc.is_object()) throw FormatError("box pushing config must be an object");
    BoxPushingConfig c;
    try {
        optional_field(doc, "width", c.width);
        optional_field(doc, "height", c.height);
        optional_field(doc, "goal_row", c.goal_row);
        if (doc.contains("small_boxes")) {
            const auto& boxes = doc.at("small_boxes");
            if (!boxes.is_array() || boxes.size() != 2) throw FormatError("exactly two small boxes required");
            for (std::size_t k = 0; k < 2; ++k) c.small_boxes[k] = cell_from(boxes[k]);
        }
        if (doc.contains("large_box")) c.large_box = cell_from(doc.at("large_box"));
        if (doc.contains("agents")) {
            const auto& agents = doc.at("agents");
            if (!agents.is_array() || agents.size() != 2) throw FormatError("exactly two agents required");
            for (std::size_t i = 0; i < 2; ++i) {
                c.agents[i].cell = cell_from(agents[i].at("cell"));
                c.agents[i].heading = agents[i].value("heading", 0);
            }
        }
        optional_field(doc, "small_box_reward", c.small_box_reward);
        optional_field(doc, "large_box_reward", c.large_box_reward);
        optional_field(doc, "bump_penalty", c.bump_penalty);
        optional_field(doc, "step_cost", c.step_cost);
        optional_field(doc, "gamma", c.gamma);
        optional_field(doc, "horizon", c.horizon);
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
    return c;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace ffp
