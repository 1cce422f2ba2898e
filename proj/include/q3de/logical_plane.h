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

#ifndef Q3DE_LOGICAL_PLANE_H
#define Q3DE_LOGICAL_PLANE_H

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "q3de/instruction.h"
#include "q3de/pipeline.h"
#include "q3de/rng.h"
#include "q3de/surface_code.h"

namespace q3de {

enum class BlockState { kLogical, kVacant, kOccupied, kExpanded, kMasked };

/// Grid of code blocks. Logical qubits sit at odd-odd positions; blocks in
/// even rows or columns are routing space. Time is counted in ticks of d
/// code cycles; a block is busy while its "until" tick lies in the future.
class BlockGrid {
   public:
    BlockGrid(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int num_blocks() const { return rows_ * cols_; }
    int num_qubits() const { return static_cast<int>(qubits_.size()); }
    Coord position(int qubit) const { return qubits_[qubit]; }
    /// Logical qubit at the block, or -1 for routing space.
    int qubit_at(Coord b) const { return block(b).qubit; }
    Coord block_coord(int index) const { return {index / cols_, index % cols_}; }

    BlockState state(Coord b, long tick) const;
    /// Vacant routing block usable by an operation at this tick.
    bool routable(Coord b, long tick) const;
    bool qubit_free(int qubit, long tick) const { return block(qubits_[qubit]).busy_until <= tick; }

    void occupy(Coord b, long until);
    void mask(Coord b, long until);
    /// Claims a 2x2 neighborhood for the qubit, trying the square that
    /// extends down-right first, then down-left, up-right, up-left. Extends
    /// the hold if already expanded. Returns false if no square is free.
    bool expand(int qubit, long tick, long until);
    bool expanded(int qubit, long tick) const;

    /// Shortest path of routable blocks joining the two logical blocks;
    /// ties broken lexicographically.
    std::optional<std::vector<Coord>> route(int qa, int qb, long tick) const;

   private:
    struct Block {
        int qubit = -1;
        long busy_until = 0;
        long masked_until = 0;
        long expanded_until = 0;
        int expanded_by = -1;
    };
    const Block &block(Coord b) const { return blocks_[b.row * cols_ + b.col]; }
    Block &block(Coord b) { return blocks_[b.row * cols_ + b.col]; }
    bool inside(Coord b) const { return b.row >= 0 && b.row < rows_ && b.col >= 0 && b.col < cols_; }

    int rows_;
    int cols_;
    std::vector<Block> blocks_;
    std::vector<Coord> qubits_;
    std::vector<long> expansion_until_;
};

struct CommittedOp {
    Instruction instruction;
    std::vector<Coord> path;
};

/// Commits waiting instructions greedily in queue order, looking at most
/// `lookahead` entries deep. Committed plane ops hold their blocks for
/// latency_ticks. Reads complete immediately.
std::vector<CommittedOp> schedule_tick(BlockGrid &grid, std::deque<Instruction> &queue, long tick,
                                       int latency_ticks = 1, int lookahead = 64);

/// Outage probability of one block per tick: d * tau_cyc * f_ano.
double block_mbbe_probability(int d, double tau_cyc, double f_ano);

/// Draws block outages tick by tick by skipping over the flattened
/// (tick, block) sequence.
class MbbeInjector {
   public:
    MbbeInjector(int num_blocks, double p_tick, Rng &rng);
    /// Blocks hit at this tick. Ticks must be visited in increasing order.
    std::vector<int> outages(long tick);

   private:
    int num_blocks_;
    double p_;
    Rng *rng_;
    std::uint64_t next_;
};

/// Applies outages: vacant blocks are masked for the duration; logical
/// blocks get an expansion request (Q3DE) that the grid places when it can.
void inject_block_mbbes(BlockGrid &grid, ExpansionQueue &expansions, const std::vector<int> &hit, long tick,
                        long duration_ticks, int d, int d_ano);

enum class ThroughputMode { kNoMbbe, kQ3de, kBaselineDoubled };

std::string throughput_mode_name(ThroughputMode mode);
ThroughputMode throughput_mode_from_name(const std::string &name);

struct ThroughputConfig {
    ThroughputMode mode = ThroughputMode::kQ3de;
    int n_instr = 10000;
    int grid_rows = 11;
    int grid_cols = 11;
    int d = 11;
    int d_ano = 4;
    double tau_cyc = 1e-6;
    double f_ano = 0.1;
    /// Outage duration in code cycles.
    long duration_cycles = 1100;
    int lookahead = 64;
    /// Scheduling stops here; the run is then reported as saturated.
    long max_ticks = 10000000;
    std::uint64_t seed = 1;
};

struct ThroughputResult {
    /// Completed instructions per d code cycles.
    double mean = 0.0;
    double standard_error = 0.0;
    long ticks = 0;
    long outages = 0;
    long completed = 0;
    bool saturated = false;
};

/// Random meas_ZZ instructions on distinct logical pairs, scheduled until
/// all complete. The doubled-distance baseline runs the same schedule with
/// ticks twice as long and ignores outages.
ThroughputResult throughput_experiment(const ThroughputConfig &config);

void write_throughput_header(std::ostream &out);
void write_throughput_row(std::ostream &out, const ThroughputConfig &config, const ThroughputResult &result);

}  // namespace q3de

#endif  // Q3DE_LOGICAL_PLANE_H
