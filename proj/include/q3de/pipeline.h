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

#ifndef Q3DE_PIPELINE_H
#define Q3DE_PIPELINE_H

#include <array>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "q3de/decoder.h"
#include "q3de/instruction.h"
#include "q3de/surface_code.h"

namespace q3de {

/// c_bat = round(sqrt(2 * c_win)), at least 1.
int batch_size(int c_win);

struct PauliFrame {
    std::vector<std::uint8_t> x;
    std::vector<std::uint8_t> z;
    bool operator==(const PauliFrame &) const = default;
};

struct RegisterEntry {
    std::uint8_t raw = 0;
    int cycle = 0;
    bool corrected = false;
    std::uint8_t value = 0;
    bool consumed = false;
    int consumed_cycle = -1;
    bool operator==(const RegisterEntry &) const = default;
};

enum class ReadPolicy {
    /// Consume as soon as the frame has caught up with the entry.
    kEager,
    /// Additionally wait c_lat cycles so no later rollback can touch it.
    kSafe,
};

struct PipelineConfig {
    int c_win = 300;
    int c_lat = 0;
    double p = 1e-3;
    double p_meas = 1e-3;
    MatcherKind matcher = MatcherKind::kExact;
    ReadPolicy read_policy = ReadPolicy::kEager;
};

enum class RollbackOutcome { kApplied, kAborted, kOutOfRange };

struct PipelineEvent {
    int cycle = 0;
    std::string type;
    std::string payload;
};

/// Streaming decoder state for one logical patch.
///
/// Each cycle a detector layer is queued. Once d layers lie past the commit
/// frontier f, the window [f, f + d] is matched and every match touching
/// layer f is committed to the Pauli frame; f then advances. Commits are
/// grouped into batches of c_bat frontier cycles; each batch stores its
/// frame updates as reversible XOR deltas so a rollback can undo it.
class Pipeline {
   public:
    Pipeline(const CodeGeometry &geometry, PipelineConfig config);
    Pipeline(const Pipeline &) = delete;
    Pipeline &operator=(const Pipeline &) = delete;

    /// Queues the layer for the next cycle (active ancillas per species) and
    /// the instructions issued in that cycle, then decodes what it can.
    void step(const std::array<std::vector<int>, 2> &active, std::span<const Instruction> instructions = {});
    /// Decodes and commits everything left, as if a perfect round followed.
    void finish();

    /// Undoes all batches from the one containing detect_cycle - c_lat - d,
    /// marks affected register entries uncorrected and re-decodes, in aware
    /// mode when a region is given. Aborts without any change if a read has
    /// consumed an affected entry.
    RollbackOutcome rollback(int detect_cycle, std::optional<AnomalousRegion> aware_region);

    const PauliFrame &frame() const { return frame_; }
    const std::vector<RegisterEntry> &register_entries() const { return register_; }
    int frontier() const { return frontier_; }
    /// Number of layers received.
    int cycle() const { return next_cycle_; }
    int c_bat() const { return c_bat_; }
    int num_batches() const { return static_cast<int>(batches_.size()); }
    /// Oldest cycle a rollback can reach.
    int oldest_rollback_cycle() const;
    const std::vector<PipelineEvent> &events() const { return events_; }
    /// Consumed reads as (entry, cycles from measurement to consumption / d).
    const std::vector<std::pair<int, double>> &read_latencies() const { return read_latency_; }
    bool aware() const { return region_.has_value(); }
    void log_event(int cycle, std::string type, std::string payload);

   private:
    struct FrameOp {
        bool swap = false;
        std::vector<std::uint8_t> dx;
        std::vector<std::uint8_t> dz;
    };
    struct NodeRef {
        int species;
        int ancilla;
        int layer;
    };
    struct Batch {
        int start = 0;
        std::vector<FrameOp> ops;
        std::vector<NodeRef> consumed;
        /// Committed pairs whose endpoints fall in different batches.
        std::vector<std::pair<NodeRef, NodeRef>> links;
    };
    struct Layer {
        std::array<std::vector<int>, 2> active;
        std::array<std::vector<char>, 2> consumed;
    };
    struct WindowDecoder {
        std::unique_ptr<DistanceModel> metric;
        std::unique_ptr<DijkstraDistance> paths;
    };

    Layer &layer_at(int cycle) { return layers_[cycle - base_cycle_]; }
    Batch &batch_for(int frontier);
    void xor_delta(Species s, const std::vector<std::uint8_t> &flips);
    void apply_op(const FrameOp &op);
    void advance(bool final_window);
    void decode_window(int first, int last, bool commit_all);
    void apply_instructions_at(int cycle);
    void serve_reads();
    void trim();
    const WindowDecoder &window_decoder(Species s, int first, int num_layers);

    const CodeGeometry *geometry_;
    PipelineConfig config_;
    int d_;
    int c_bat_;
    std::array<DecodingGraph, 2> graphs_;
    std::optional<AnomalousRegion> region_;
    std::map<std::tuple<int, int, int, int>, WindowDecoder> decoders_;

    std::deque<Layer> layers_;
    int base_cycle_ = 0;
    int next_cycle_ = 0;
    int frontier_ = 0;
    int horizon_ = 0;  // batches starting before this were dropped
    std::deque<Batch> batches_;
    PauliFrame frame_;
    std::vector<RegisterEntry> register_;
    std::vector<Instruction> instructions_;
    std::size_t next_instr_ = 0;
    std::vector<std::pair<int, int>> pending_reads_;  // (entry, issue cycle)
    std::vector<std::pair<int, double>> read_latency_;
    std::vector<PipelineEvent> events_;
};

struct ExpansionRequest {
    int qubit = -1;
    int d_exp = 0;
    int hold_until = 0;
};

/// Pending op_expand requests keyed by logical qubit.
class ExpansionQueue {
   public:
    /// Queues (or extends) an expansion for a detection on a logical qubit.
    /// d_exp = 2d, raised to d + 2 * d_ano + 1 when that is not larger than
    /// d + 2 * d_ano. A repeated detection while held only extends the hold.
    /// Detections on routing space (qubit < 0) produce no request.
    std::optional<ExpansionRequest> request(int qubit, int d, int d_ano, int cycle, int hold_cycles);
    /// Drops requests whose hold has expired; returns the released qubits.
    std::vector<int> release(int cycle);
    const std::map<int, ExpansionRequest> &active() const { return active_; }

   private:
    std::map<int, ExpansionRequest> active_;
};

struct MemoryFootprint {
    double syndrome_queue_bits = 0.0;
    double counter_bits = 0.0;
    double matching_queue_bits = 0.0;
};

/// Syndrome queue 2d^2 (c_win + c_bat) with c_bat = round(sqrt(2 c_win));
/// active-node counter 2d^2 log2(c_win); matching queue 2d^2 sqrt(c_win / 2).
MemoryFootprint memory_footprint(int d, int c_win);

void write_event_log(std::ostream &out, const std::vector<PipelineEvent> &events);

}  // namespace q3de

#endif  // Q3DE_PIPELINE_H
