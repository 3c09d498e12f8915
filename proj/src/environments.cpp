#include "ffp/environments.hpp"

#include <deque>
#include <map>
#include <optional>
#include <sstream>

namespace ffp {

NormalFormGame uav_game(bool printed_table) {
    // joint order (Sec,Sec), (Sec,Above), (Above,Sec), (Above,Above)
    Eigen::VectorXd row(4), col(4);
    if (printed_table) {
        row << 0, 1, 0, -4;
        col << 0, 0, 1, -4;
    } else {
        row << 0, 0, 1, -4;
        col << 0, 1, 0, -4;
    }
    return NormalFormGame({2, 2}, {row, col});
}

Posg toy_posg() {
    Eigen::VectorXd r0(4), r1(4);
    r0 << 1, 0, 0, 0;
    r1 << 0, 0, 0, 4;
    std::vector<NormalFormGame> stages{identical_interest_game({2, 2}, r0), identical_interest_game({2, 2}, r1)};
    return Posg(std::move(stages), {{0, 0, 0, 1}, {1, 1, 1, 1}}, 0.9, 0);
}

namespace {

constexpr int kDr[4] = {-1, 0, 1, 0};
constexpr int kDc[4] = {0, 1, 0, -1};

Cell step(Cell c, int heading) { return {c.row + kDr[heading], c.col + kDc[heading]}; }

struct Layout {
    std::array<Pose, 2> agents;
    std::array<Cell, 2> small;
    Cell large;

    std::vector<int> key() const {
        std::vector<int> k;
        for (const auto& p : agents) k.insert(k.end(), {p.cell.row, p.cell.col, p.heading});
        for (const auto& c : small) k.insert(k.end(), {c.row, c.col});
        k.insert(k.end(), {large.row, large.col});
        return k;
    }
};

struct Outcome {
    std::optional<Layout> next;  ///< empty when something was delivered
    int delivered = 0;           ///< bit 0/1 small boxes, bit 2 large box
    double reward = 0.0;
};

class Simulator {
public:
    explicit Simulator(const BoxPushingConfig& c) : cfg_(c) {}

    bool on_grid(Cell c) const { return c.row >= 0 && c.row < cfg_.height && c.col >= 0 && c.col < cfg_.width; }

    static bool in_large(const Layout& l, Cell c) {
        return c.row == l.large.row && (c.col == l.large.col || c.col == l.large.col + 1);
    }

    int front_signal(const Layout& l, int i) const {
        const Cell f = step(l.agents[static_cast<std::size_t>(i)].cell, l.agents[static_cast<std::size_t>(i)].heading);
        if (!on_grid(f)) return box_signal::wall;
        if (f == l.agents[static_cast<std::size_t>(1 - i)].cell) return box_signal::agent;
        if (f == l.small[0] || f == l.small[1]) return box_signal::small_box;
        if (in_large(l, f)) return box_signal::large_box;
        return box_signal::empty;
    }

    Outcome apply(const Layout& l, std::array<int, 2> act) const {
        Layout n = l;
        for (int i = 0; i < 2; ++i) {
            auto& h = n.agents[static_cast<std::size_t>(i)].heading;
            if (act[static_cast<std::size_t>(i)] == box_action::turn_left) h = (h + 3) % 4;
            if (act[static_cast<std::size_t>(i)] == box_action::turn_right) h = (h + 1) % 4;
        }

        std::array<bool, 2> forward{act[0] == box_action::forward, act[1] == box_action::forward};
        std::array<bool, 2> bump{false, false};
        std::array<bool, 2> moves{false, false};
        std::array<int, 2> pushes_small{-1, -1};
        bool large_moves = false;

        // joint push of the large box: both agents directly behind its two cells,
        // facing the same way across the box's long axis
        if (forward[0] && forward[1] && l.agents[0].heading == l.agents[1].heading &&
            kDr[l.agents[0].heading] != 0) {
            const int h = l.agents[0].heading;
            const Cell t0 = step(l.agents[0].cell, h), t1 = step(l.agents[1].cell, h);
            if (in_large(l, t0) && in_large(l, t1) && !(t0 == t1)) {
                const Cell dest{l.large.row + kDr[h], l.large.col};
                const Cell dest2{dest.row, dest.col + 1};
                const bool free = on_grid(dest) && on_grid(dest2) && !(dest == l.small[0]) && !(dest == l.small[1]) &&
                                  !(dest2 == l.small[0]) && !(dest2 == l.small[1]);
                if (free) {
                    large_moves = true;
                    moves = {true, true};
                    n.large = dest;
                } else {
                    bump = {true, true};
                }
            }
        }

        if (!large_moves && !bump[0]) {
            for (int i = 0; i < 2; ++i) {
                if (!forward[static_cast<std::size_t>(i)]) continue;
                const Pose& p = l.agents[static_cast<std::size_t>(i)];
                const Cell t = step(p.cell, p.heading);
                if (!on_grid(t) || t == l.agents[static_cast<std::size_t>(1 - i)].cell) {
                    bump[static_cast<std::size_t>(i)] = true;
                } else if (in_large(l, t)) {
                    // pushing the large box alone has no effect
                } else if (t == l.small[0] || t == l.small[1]) {
                    const int k = t == l.small[0] ? 0 : 1;
                    const Cell d = step(t, p.heading);
                    if (!on_grid(d) || d == l.small[static_cast<std::size_t>(1 - k)] || in_large(l, d) ||
                        d == l.agents[0].cell || d == l.agents[1].cell) {
                        bump[static_cast<std::size_t>(i)] = true;
                    } else {
                        pushes_small[static_cast<std::size_t>(i)] = k;
                        moves[static_cast<std::size_t>(i)] = true;
                    }
                } else {
                    moves[static_cast<std::size_t>(i)] = true;
                }
            }
            for (int i = 0; i < 2; ++i) {
                if (!moves[static_cast<std::size_t>(i)]) continue;
                auto& p = n.agents[static_cast<std::size_t>(i)];
                p.cell = step(p.cell, p.heading);
                const int k = pushes_small[static_cast<std::size_t>(i)];
                if (k >= 0) n.small[static_cast<std::size_t>(k)] = step(n.small[static_cast<std::size_t>(k)], p.heading);
            }
            // simultaneous moves that end on a shared cell cancel and count as bumps
            std::vector<Cell> cells{n.agents[0].cell, n.agents[1].cell, n.small[0], n.small[1]};
            bool clash = false;
            for (std::size_t a = 0; a < cells.size(); ++a) {
                if (in_large(n, cells[a])) clash = true;
                for (std::size_t b = a + 1; b < cells.size(); ++b)
                    if (cells[a] == cells[b]) clash = true;
            }
            if (clash) {
                for (int i = 0; i < 2; ++i)
                    if (moves[static_cast<std::size_t>(i)]) bump[static_cast<std::size_t>(i)] = true;
                for (int i = 0; i < 2; ++i) n.agents[static_cast<std::size_t>(i)].cell = l.agents[static_cast<std::size_t>(i)].cell;
                n.small = l.small;
                moves = {false, false};
            }
        }

        Outcome out;
        out.reward = cfg_.step_cost + cfg_.bump_penalty * (static_cast<int>(bump[0]) + static_cast<int>(bump[1]));
        for (int k = 0; k < 2; ++k)
            if (n.small[static_cast<std::size_t>(k)].row == cfg_.goal_row &&
                !(n.small[static_cast<std::size_t>(k)] == l.small[static_cast<std::size_t>(k)])) {
                out.delivered |= 1 << k;
                out.reward += cfg_.small_box_reward;
            }
        if (large_moves && n.large.row == cfg_.goal_row) {
            out.delivered |= 4;
            out.reward += cfg_.large_box_reward;
        }
        if (out.delivered == 0) out.next = n;
        return out;
    }

private:
    const BoxPushingConfig& cfg_;
};

std::string describe(const Layout& l) {
    static const char* kHeading = "NESW";
    std::ostringstream os;
    for (int i = 0; i < 2; ++i) {
        const auto& p = l.agents[static_cast<std::size_t>(i)];
        os << (i ? " " : "") << "agent" << i << "=(" << p.cell.row << ',' << p.cell.col << ','
           << kHeading[p.heading] << ')';
    }
    for (int k = 0; k < 2; ++k)
        os << " small" << k << "=(" << l.small[static_cast<std::size_t>(k)].row << ','
           << l.small[static_cast<std::size_t>(k)].col << ')';
    os << " large=(" << l.large.row << ',' << l.large.col << ')';
    return os.str();
}

}  // namespace

void validate(const BoxPushingConfig& c) {
    if (c.width < 2 || c.height < 2) throw ArgumentError("grid must be at least 2x2");
    if (c.goal_row < 0 || c.goal_row >= c.height) throw ArgumentError("goal row off grid");
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ArgumentError("discount must lie in [0,1)");
    if (c.horizon < 1) throw ArgumentError("horizon must be positive");
    auto on_grid = [&](Cell x) { return x.row >= 0 && x.row < c.height && x.col >= 0 && x.col < c.width; };
    std::vector<Cell> occupied{c.small_boxes[0], c.small_boxes[1], c.large_box, {c.large_box.row, c.large_box.col + 1}};
    for (std::size_t k = 0; k < occupied.size(); ++k)
        if (occupied[k].row == c.goal_row) throw ArgumentError("boxes may not start in the goal row");
    for (const auto& a : c.agents) {
        if (a.heading < 0 || a.heading > 3) throw ArgumentError("heading must lie in 0..3");
        occupied.push_back(a.cell);
    }
    for (std::size_t a = 0; a < occupied.size(); ++a) {
        if (!on_grid(occupied[a])) throw ArgumentError("layout position off grid");
        for (std::size_t b = a + 1; b < occupied.size(); ++b)
            if (occupied[a] == occupied[b]) throw ArgumentError("layout positions overlap");
    }
}

BoxPushingWorld box_pushing(const BoxPushingConfig& config) {
    validate(config);
    const Simulator sim(config);
    Layout start{config.agents, config.small_boxes, config.large_box};

    std::vector<Layout> layouts{start};
    std::map<std::vector<int>, int> index{{start.key(), 0}};
    std::map<int, int> delivery_index;  // delivered mask -> state
    std::vector<int> delivery_masks;    // parallel to delivery states, filled after search

    struct Row {
        std::vector<int> next;
        Eigen::VectorXd reward;
    };
    std::vector<Row> rows;
    std::deque<int> frontier{0};

    // search over grid layouts; delivery states are numbered afterwards
    std::vector<std::vector<int>> masks_for;  // per layout row: delivery mask per joint, 0 if none
    while (!frontier.empty()) {
        const int s = frontier.front();
        frontier.pop_front();
        if (static_cast<int>(rows.size()) <= s) {
            rows.resize(static_cast<std::size_t>(s + 1));
            masks_for.resize(static_cast<std::size_t>(s + 1));
        }
        Row row{std::vector<int>(16, -1), Eigen::VectorXd(16)};
        std::vector<int> masks(16, 0);
        for (int a0 = 0; a0 < 4; ++a0)
            for (int a1 = 0; a1 < 4; ++a1) {
                const int joint = a0 * 4 + a1;
                const Outcome o = sim.apply(layouts[static_cast<std::size_t>(s)], {a0, a1});
                row.reward[joint] = o.reward;
                if (!o.next) {
                    masks[static_cast<std::size_t>(joint)] = o.delivered;
                    continue;
                }
                auto [it, inserted] = index.emplace(o.next->key(), static_cast<int>(layouts.size()));
                if (inserted) {
                    layouts.push_back(*o.next);
                    frontier.push_back(it->second);
                }
                row.next[static_cast<std::size_t>(joint)] = it->second;
            }
        rows[static_cast<std::size_t>(s)] = std::move(row);
        masks_for[static_cast<std::size_t>(s)] = std::move(masks);
    }

    const int num_layouts = static_cast<int>(layouts.size());
    for (int s = 0; s < num_layouts; ++s)
        for (int mask : masks_for[static_cast<std::size_t>(s)])
            if (mask) delivery_index.emplace(mask, 0);
    int next_id = num_layouts;
    for (auto& [mask, id] : delivery_index) {
        id = next_id++;
        delivery_masks.push_back(mask);
    }

    std::vector<std::string> names;
    std::vector<NormalFormGame> stages;
    std::vector<std::vector<int>> transitions;
    std::vector<std::vector<int>> signals;
    for (int s = 0; s < num_layouts; ++s) {
        auto& row = rows[static_cast<std::size_t>(s)];
        for (int j = 0; j < 16; ++j)
            if (row.next[static_cast<std::size_t>(j)] < 0)
                row.next[static_cast<std::size_t>(j)] =
                    delivery_index.at(masks_for[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)]);
        stages.push_back(identical_interest_game({4, 4}, row.reward));
        transitions.push_back(std::move(row.next));
        const Layout& l = layouts[static_cast<std::size_t>(s)];
        signals.push_back({sim.front_signal(l, 0), sim.front_signal(l, 1)});
        names.push_back(describe(l));
    }
    for (int mask : delivery_masks) {
        stages.push_back(identical_interest_game({4, 4}, Eigen::VectorXd::Constant(16, config.step_cost)));
        transitions.emplace_back(16, 0);
        signals.push_back({box_signal::empty, box_signal::empty});
        names.push_back("delivered mask=" + std::to_string(mask));
    }
    return {Posg(std::move(stages), std::move(transitions), config.gamma, 0, std::move(signals), 5), next_id,
            std::move(names)};
}

}  // namespace ffp
