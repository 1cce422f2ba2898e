// Copyright 2026 The Q3DE Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "q3de/logical_plane.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace q3de {

BlockGrid::BlockGrid(int rows, int cols) : rows_(rows), cols_(cols), blocks_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 3 || cols < 3) {
        throw std::invalid_argument("block grid needs at least 3x3 blocks");
    }
    for (int r = 1; r < rows; r += 2) {
        for (int c = 1; c < cols; c += 2) {
            if (r == rows - 1 || c == cols - 1) {
                continue;
            }
            block({r, c}).qubit = static_cast<int>(qubits_.size());
            qubits_.push_back({r, c});
        }
    }
    expansion_until_.assign(qubits_.size(), 0);
}

BlockState BlockGrid::state(Coord b, long tick) const {
    const Block &x = block(b);
    if (x.qubit >= 0) {
        return x.busy_until > tick ? BlockState::kOccupied : BlockState::kLogical;
    }
    if (x.masked_until > tick) {
        return BlockState::kMasked;
    }
    if (x.expanded_by >= 0 && x.expanded_until > tick) {
        return BlockState::kExpanded;
    }
    return x.busy_until > tick ? BlockState::kOccupied : BlockState::kVacant;
}

bool BlockGrid::routable(Coord b, long tick) const { return inside(b) && state(b, tick) == BlockState::kVacant; }

void BlockGrid::occupy(Coord b, long until) { block(b).busy_until = std::max(block(b).busy_until, until); }

void BlockGrid::mask(Coord b, long until) { block(b).masked_until = std::max(block(b).masked_until, until); }

bool BlockGrid::expanded(int qubit, long tick) const { return expansion_until_[qubit] > tick; }

bool BlockGrid::expand(int qubit, long tick, long until) {
    const Coord q = qubits_[qubit];
    if (expanded(qubit, tick)) {
        expansion_until_[qubit] = std::max(expansion_until_[qubit], until);
        for (auto &x : blocks_) {
            if (x.expanded_by == qubit && x.expanded_until > tick) {
                x.expanded_until = expansion_until_[qubit];
            }
        }
        return true;
    }
    constexpr std::array<std::array<int, 2>, 4> kSquares{{{0, 0}, {0, -1}, {-1, 0}, {-1, -1}}};
    for (const auto &[dr, dc] : kSquares) {
        std::vector<Coord> cells;
        bool ok = true;
        for (int i = 0; i < 2 && ok; ++i) {
            for (int j = 0; j < 2 && ok; ++j) {
                Coord b{q.row + dr + i, q.col + dc + j};
                if (b == q) {
                    continue;
                }
                ok = routable(b, tick);
                cells.push_back(b);
            }
        }
        if (!ok) {
            continue;
        }
        for (Coord b : cells) {
            block(b).expanded_by = qubit;
            block(b).expanded_until = until;
        }
        expansion_until_[qubit] = until;
        return true;
    }
    return false;
}

std::optional<std::vector<Coord>> BlockGrid::route(int qa, int qb, long tick) const {
    constexpr std::array<std::array<int, 2>, 4> kSteps{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
    const Coord a = qubits_[qa];
    const Coord b = qubits_[qb];
    std::vector<int> parent(blocks_.size(), -2);
    std::vector<int> frontier;
    for (const auto &[dr, dc] : kSteps) {
        Coord n{a.row + dr, a.col + dc};
        if (routable(n, tick)) {
            const int id = n.row * cols_ + n.col;
            parent[id] = -1;
            frontier.push_back(id);
        }
    }
    auto is_target = [&](int id) {
        Coord c = block_coord(id);
        return std::abs(c.row - b.row) + std::abs(c.col - b.col) == 1;
    };
    while (!frontier.empty()) {
        std::sort(frontier.begin(), frontier.end());
        for (int id : frontier) {
            if (!is_target(id)) {
                continue;
            }
            std::vector<Coord> path;
            for (int v = id; v != -1; v = parent[v]) {
                path.push_back(block_coord(v));
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        std::vector<int> next;
        for (int id : frontier) {
            Coord c = block_coord(id);
            for (const auto &[dr, dc] : kSteps) {
                Coord n{c.row + dr, c.col + dc};
                if (!routable(n, tick)) {
                    continue;
                }
                const int nid = n.row * cols_ + n.col;
                if (parent[nid] != -2) {
                    continue;
                }
                parent[nid] = id;
                next.push_back(nid);
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

std::vector<CommittedOp> schedule_tick(BlockGrid &grid, std::deque<Instruction> &queue, long tick, int latency_ticks,
                                       int lookahead) {
    std::vector<CommittedOp> out;
    const long until = tick + latency_ticks;
    int scanned = 0;
    for (auto it = queue.begin(); it != queue.end() && scanned < lookahead; ++scanned) {
        const Instruction &ins = *it;
        bool ok = true;
        for (int q : ins.operands) {
            ok = ok && q >= 0 && q < grid.num_qubits() && grid.qubit_free(q, tick);
        }
        if (!ok && ins.op != Opcode::kRead) {
            ++it;
            continue;
        }
        CommittedOp op{ins, {}};
        if (ins.op == Opcode::kMeasZZ) {
            if (ins.operands.size() != 2 || ins.operands[0] == ins.operands[1]) {
                throw std::invalid_argument("meas_ZZ needs two distinct operands");
            }
            auto path = grid.route(ins.operands[0], ins.operands[1], tick);
            if (!path) {
                ++it;
                continue;
            }
            op.path = std::move(*path);
        }
        if (uses_plane(ins.op)) {
            for (int q : ins.operands) {
                grid.occupy(grid.position(q), until);
            }
            for (Coord b : op.path) {
                grid.occupy(b, until);
            }
        }
        out.push_back(std::move(op));
        it = queue.erase(it);
    }
    return out;
}

double block_mbbe_probability(int d, double tau_cyc, double f_ano) { return d * tau_cyc * f_ano; }

MbbeInjector::MbbeInjector(int num_blocks, double p_tick, Rng &rng)
    : num_blocks_(num_blocks), p_(p_tick), rng_(&rng), next_(rng.geometric_skip(p_tick)) {
    if (p_tick < 0.0 || p_tick > 1.0) {
        throw std::invalid_argument("per-tick outage probability must lie in [0, 1]");
    }
}

std::vector<int> MbbeInjector::outages(long tick) {
    std::vector<int> hit;
    const std::uint64_t end = static_cast<std::uint64_t>(tick + 1) * num_blocks_;
    const std::uint64_t begin = static_cast<std::uint64_t>(tick) * num_blocks_;
    while (next_ < end) {
        if (next_ >= begin) {
            hit.push_back(static_cast<int>(next_ - begin));
        }
        const std::uint64_t skip = rng_->geometric_skip(p_);
        next_ = skip >= std::numeric_limits<std::uint64_t>::max() / 2 - next_ ? std::numeric_limits<std::uint64_t>::max()
                                                                                : next_ + skip + 1;
    }
    return hit;
}

void inject_block_mbbes(BlockGrid &grid, ExpansionQueue &expansions, const std::vector<int> &hit, long tick,
                        long duration_ticks, int d, int d_ano) {
    for (int id : hit) {
        const Coord b = grid.block_coord(id);
        const int q = grid.qubit_at(b);
        if (q < 0) {
            grid.mask(b, tick + duration_ticks);
        } else {
            expansions.request(q, d, d_ano, static_cast<int>(tick), static_cast<int>(duration_ticks));
        }
    }
    for (const auto &[q, req] : expansions.active()) {
        grid.expand(q, tick, req.hold_until);
    }
}

std::string throughput_mode_name(ThroughputMode mode) {
    switch (mode) {
        case ThroughputMode::kNoMbbe:
            return "no_mbbe";
        case ThroughputMode::kQ3de:
            return "q3de";
        case ThroughputMode::kBaselineDoubled:
            return "baseline_doubled_d";
    }
    return "unknown";
}

ThroughputMode throughput_mode_from_name(const std::string &name) {
    if (name == "no_mbbe") {
        return ThroughputMode::kNoMbbe;
    }
    if (name == "q3de") {
        return ThroughputMode::kQ3de;
    }
    if (name == "baseline_doubled_d") {
        return ThroughputMode::kBaselineDoubled;
    }
    throw std::invalid_argument("unknown throughput mode '" + name + "'");
}

ThroughputResult throughput_experiment(const ThroughputConfig &config) {
    if (config.n_instr < 1 || config.d < 1 || config.lookahead < 1) {
        throw std::invalid_argument("throughput experiment needs n_instr, d and lookahead >= 1");
    }
    BlockGrid grid(config.grid_rows, config.grid_cols);
    const int nq = grid.num_qubits();
    if (nq < 2) {
        throw std::invalid_argument("grid hosts fewer than two logical qubits");
    }
    Rng rng(derive_seed(config.seed, {0x7470ULL}));
    Rng mbbe_rng(derive_seed(config.seed, {0x6d62ULL}));
    const bool inject = config.mode == ThroughputMode::kQ3de && config.f_ano > 0.0;
    const double p_tick = inject ? block_mbbe_probability(config.d, config.tau_cyc, config.f_ano) : 0.0;
    MbbeInjector injector(grid.num_blocks(), p_tick, mbbe_rng);
    ExpansionQueue expansions;
    const long duration_ticks = std::max<long>(1, (config.duration_cycles + config.d - 1) / config.d);

    std::deque<Instruction> queue;
    int remaining = config.n_instr;
    int committed = 0;
    std::vector<long> completions_at;
    ThroughputResult result;
    long tick = 0;
    int done = 0;
    while (done < config.n_instr && tick < config.max_ticks) {
        while (remaining > 0 && static_cast<int>(queue.size()) < config.lookahead) {
            Instruction ins;
            ins.op = Opcode::kMeasZZ;
            const int a = static_cast<int>(rng.below(nq));
            int b = static_cast<int>(rng.below(nq - 1));
            b += b >= a ? 1 : 0;
            ins.operands = {a, b};
            ins.cycle = static_cast<int>(tick * config.d);
            queue.push_back(std::move(ins));
            --remaining;
        }
        if (inject) {
            auto hit = injector.outages(tick);
            result.outages += static_cast<long>(hit.size());
            inject_block_mbbes(grid, expansions, hit, tick, duration_ticks, config.d, config.d_ano);
            expansions.release(static_cast<int>(tick));
        }
        auto ops = schedule_tick(grid, queue, tick, 1, config.lookahead);
        committed += static_cast<int>(ops.size());
        if (completions_at.size() <= static_cast<std::size_t>(tick + 1)) {
            completions_at.resize(tick + 2, 0);
        }
        completions_at[tick + 1] += static_cast<long>(ops.size());
        done = committed;
        if (committed + static_cast<int>(queue.size()) + remaining != config.n_instr) {
            throw std::logic_error("instruction count not conserved");
        }
        ++tick;
    }
    const long ticks = std::max<long>(tick, 1);
    result.completed = done;
    result.saturated = done < config.n_instr;
    const double scale = config.mode == ThroughputMode::kBaselineDoubled ? 0.5 : 1.0;
    double sum = 0.0;
    double sum2 = 0.0;
    for (long t = 1; t <= ticks; ++t) {
        const double x = static_cast<double>(t < static_cast<long>(completions_at.size()) ? completions_at[t] : 0);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / ticks;
    const double var = ticks > 1 ? std::max(0.0, (sum2 - ticks * mean * mean) / (ticks - 1)) : 0.0;
    result.mean = scale * mean;
    result.standard_error = scale * std::sqrt(var / ticks);
    result.ticks = config.mode == ThroughputMode::kBaselineDoubled ? 2 * ticks : ticks;
    return result;
}

void write_throughput_header(std::ostream &out) { out << "mode,duration,f_ano,throughput_mean,throughput_se\n"; }

void write_throughput_row(std::ostream &out, const ThroughputConfig &config, const ThroughputResult &result) {
    out << throughput_mode_name(config.mode) << ',' << config.duration_cycles << ',' << config.f_ano << ','
        << result.mean << ',' << result.standard_error << '\n';
}

}  // namespace q3de
