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

#include "q3de/pipeline.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace q3de {

std::string opcode_name(Opcode op) {
    switch (op) {
        case Opcode::kInitZero:
            return "init_zero";
        case Opcode::kInitA:
            return "init_A";
        case Opcode::kInitY:
            return "init_Y";
        case Opcode::kOpH:
            return "op_H";
        case Opcode::kMeasZ:
            return "meas_Z";
        case Opcode::kMeasZZ:
            return "meas_ZZ";
        case Opcode::kRead:
            return "read";
        case Opcode::kOpExpand:
            return "op_expand";
    }
    return "unknown";
}

int batch_size(int c_win) {
    return std::max(1, static_cast<int>(std::lround(std::sqrt(2.0 * std::max(c_win, 0)))));
}

Pipeline::Pipeline(const CodeGeometry &geometry, PipelineConfig config)
    : geometry_(&geometry),
      config_(config),
      d_(geometry.distance()),
      c_bat_(batch_size(config.c_win)),
      graphs_{DecodingGraph::from_code(geometry, Species::kZ), DecodingGraph::from_code(geometry, Species::kX)} {
    if (config.c_lat < 0) {
        throw std::invalid_argument("c_lat must be non-negative");
    }
    frame_.x.assign(geometry.num_data(), 0);
    frame_.z.assign(geometry.num_data(), 0);
}

int Pipeline::oldest_rollback_cycle() const { return horizon_; }

void Pipeline::log_event(int cycle, std::string type, std::string payload) {
    events_.push_back({cycle, std::move(type), std::move(payload)});
}

Pipeline::Batch &Pipeline::batch_for(int frontier) {
    const int start = frontier / c_bat_ * c_bat_;
    if (batches_.empty() || batches_.back().start != start) {
        batches_.push_back(Batch{start, {}, {}, {}});
    }
    return batches_.back();
}

void Pipeline::apply_op(const FrameOp &op) {
    if (op.swap) {
        std::swap(frame_.x, frame_.z);
        return;
    }
    for (std::size_t q = 0; q < frame_.x.size(); ++q) {
        frame_.x[q] ^= op.dx[q];
        frame_.z[q] ^= op.dz[q];
    }
}

void Pipeline::xor_delta(Species s, const std::vector<std::uint8_t> &flips) {
    auto &ops = batch_for(frontier_).ops;
    if (ops.empty() || ops.back().swap) {
        FrameOp op;
        op.dx.assign(frame_.x.size(), 0);
        op.dz.assign(frame_.z.size(), 0);
        ops.push_back(std::move(op));
    }
    auto &target = s == Species::kZ ? ops.back().dx : ops.back().dz;
    auto &frame = s == Species::kZ ? frame_.x : frame_.z;
    for (std::size_t q = 0; q < flips.size(); ++q) {
        target[q] ^= flips[q];
        frame[q] ^= flips[q];
    }
}

const Pipeline::WindowDecoder &Pipeline::window_decoder(Species s, int first, int num_layers) {
    const DecodingGraph &graph = graphs_[species_index(s)];
    std::optional<SpacetimeRegion> st;
    if (region_) {
        AnomalousRegion shifted = *region_;
        shifted.start_cycle -= first;
        auto r = SpacetimeRegion::from_anomaly(*geometry_, s, shifted, num_layers);
        if (r.first_layer <= r.last_layer) {
            st = std::move(r);
        }
    }
    const auto key = st ? std::make_tuple(species_index(s), st->first_layer, st->last_layer, num_layers)
                        : std::make_tuple(species_index(s), -1, -1, num_layers);
    auto it = decoders_.find(key);
    if (it != decoders_.end()) {
        return it->second;
    }
    WindowDecoder dec;
    if (st) {
        WeightModel w = WeightModel::anomalous(config_.p, config_.p_meas, region_->p_ano, region_->meas_rate(),
                                               std::move(*st));
        dec.metric = std::make_unique<RegionDistance>(graph, w, num_layers);
        dec.paths = std::make_unique<DijkstraDistance>(graph, std::move(w), num_layers);
    } else {
        WeightModel w = WeightModel::uniform(config_.p, config_.p_meas);
        dec.metric = std::make_unique<UniformDistance>(graph, w.space_normal, w.time_normal);
        dec.paths = std::make_unique<DijkstraDistance>(graph, std::move(w), num_layers);
    }
    return decoders_.emplace(key, std::move(dec)).first->second;
}

void Pipeline::decode_window(int first, int last, bool commit_all) {
    const int num_layers = last - first + 1;
    const int nd = geometry_->num_data();
    for (Species s : {Species::kZ, Species::kX}) {
        const int si = species_index(s);
        std::vector<Node> nodes;
        for (int t = first; t <= last; ++t) {
            const Layer &layer = layer_at(t);
            for (std::size_t k = 0; k < layer.active[si].size(); ++k) {
                if (layer.consumed[si][k] == 0) {
                    nodes.push_back({layer.active[si][k], t - first});
                }
            }
        }
        if (nodes.empty()) {
            continue;
        }
        const WindowDecoder &dec = window_decoder(s, first, num_layers);
        MatchingProblem problem = dec.metric->problem(nodes);
        MatchingResult m = config_.matcher == MatcherKind::kExact
                               ? exact_mwpm(problem)
                               : greedy_decode(problem, d_, dec.metric->normal_unit());

        std::vector<std::uint8_t> flips(nd, 0);
        auto apply = [&](const PathResult &path) {
            for (const auto &step : path.steps) {
                if (!step.time_like) {
                    flips[step.index] ^= 1U;
                }
            }
        };
        Batch &batch = batch_for(frontier_);
        auto consume = [&](const Node &n) {
            Layer &layer = layer_at(first + n.layer);
            auto pos = std::lower_bound(layer.active[si].begin(), layer.active[si].end(), n.ancilla);
            layer.consumed[si][pos - layer.active[si].begin()] = 1;
            NodeRef ref{si, n.ancilla, first + n.layer};
            batch.consumed.push_back(ref);
            return ref;
        };
        for (const auto &[a, b] : m.pairs) {
            if (!commit_all && nodes[a].layer != 0 && nodes[b].layer != 0) {
                continue;
            }
            apply(dec.paths->path(nodes[a], nodes[b]));
            NodeRef ra = consume(nodes[a]);
            NodeRef rb = consume(nodes[b]);
            if (ra.layer / c_bat_ != rb.layer / c_bat_) {
                batch.links.emplace_back(ra, rb);
            }
        }
        for (const auto &[a, side] : m.boundary_matches) {
            if (!commit_all && nodes[a].layer != 0) {
                continue;
            }
            apply(dec.paths->path_to_boundary(nodes[a], side));
            consume(nodes[a]);
        }
        xor_delta(s, flips);
    }
}

void Pipeline::apply_instructions_at(int cycle) {
    while (next_instr_ < instructions_.size() && instructions_[next_instr_].cycle <= cycle) {
        const Instruction &ins = instructions_[next_instr_++];
        switch (ins.op) {
            case Opcode::kInitZero:
            case Opcode::kInitA:
            case Opcode::kInitY: {
                auto &ops = batch_for(frontier_).ops;
                ops.push_back(FrameOp{false, frame_.x, frame_.z});
                std::fill(frame_.x.begin(), frame_.x.end(), 0);
                std::fill(frame_.z.begin(), frame_.z.end(), 0);
                break;
            }
            case Opcode::kOpH:
                batch_for(frontier_).ops.push_back(FrameOp{true, {}, {}});
                std::swap(frame_.x, frame_.z);
                break;
            case Opcode::kMeasZ: {
                RegisterEntry &e = register_[ins.entry];
                std::uint8_t parity = 0;
                for (int q : geometry_->logical_z_support()) {
                    parity ^= frame_.x[q];
                }
                e.value = e.raw ^ parity;
                e.corrected = true;
                break;
            }
            default:
                break;
        }
    }
}

void Pipeline::serve_reads() {
    const int now = next_cycle_ - 1;
    std::erase_if(pending_reads_, [&](const std::pair<int, int> &pr) {
        RegisterEntry &e = register_[pr.first];
        bool ready = e.corrected;
        if (config_.read_policy == ReadPolicy::kSafe) {
            ready = ready && now >= e.cycle + d_ + config_.c_lat;
        }
        if (!ready) {
            return false;
        }
        e.consumed = true;
        e.consumed_cycle = now;
        read_latency_.emplace_back(pr.first, static_cast<double>(now - e.cycle) / d_);
        log_event(now, "read", "entry=" + std::to_string(pr.first) + ";value=" + std::to_string(e.value));
        return true;
    });
}

void Pipeline::advance(bool final_window) {
    while (next_cycle_ - 1 - frontier_ >= d_) {
        decode_window(frontier_, frontier_ + d_, false);
        apply_instructions_at(frontier_);
        ++frontier_;
    }
    if (final_window && frontier_ < next_cycle_) {
        decode_window(frontier_, next_cycle_ - 1, true);
        for (; frontier_ < next_cycle_; ++frontier_) {
            apply_instructions_at(frontier_);
        }
    }
    serve_reads();
}

void Pipeline::trim() {
    const int now = next_cycle_ - 1;
    const int reach = now - config_.c_lat - d_;
    while (!batches_.empty() && batches_.front().start + c_bat_ <= reach) {
        horizon_ = std::max(horizon_, batches_.front().start + c_bat_);
        batches_.pop_front();
    }
    if (reach > 0) {
        horizon_ = std::max(horizon_, std::min(reach / c_bat_ * c_bat_, frontier_ / c_bat_ * c_bat_));
    }
    const int keep_from = std::min(frontier_, horizon_);
    while (!layers_.empty() && base_cycle_ < keep_from) {
        layers_.pop_front();
        ++base_cycle_;
    }
}

void Pipeline::step(const std::array<std::vector<int>, 2> &active, std::span<const Instruction> instructions) {
    const int t = next_cycle_;
    Layer layer;
    for (int si = 0; si < 2; ++si) {
        layer.active[si] = active[si];
        std::sort(layer.active[si].begin(), layer.active[si].end());
        const int n = geometry_->num_ancillas(static_cast<Species>(si));
        for (int a : layer.active[si]) {
            if (a < 0 || a >= n) {
                throw std::out_of_range("ancilla index out of range");
            }
        }
        layer.consumed[si].assign(layer.active[si].size(), 0);
    }
    layers_.push_back(std::move(layer));
    ++next_cycle_;

    for (Instruction ins : instructions) {
        ins.cycle = t;
        if (ins.op == Opcode::kMeasZ) {
            ins.entry = static_cast<int>(register_.size());
            register_.push_back(RegisterEntry{ins.raw_bit, t, false, 0, false, -1});
        } else if (ins.op == Opcode::kRead) {
            if (ins.entry < 0 || ins.entry >= static_cast<int>(register_.size())) {
                throw std::out_of_range("read of an unknown register entry");
            }
            pending_reads_.emplace_back(ins.entry, t);
        }
        log_event(t, "instr", opcode_name(ins.op) + (ins.entry >= 0 ? ";entry=" + std::to_string(ins.entry) : ""));
        instructions_.push_back(std::move(ins));
    }
    advance(false);
    trim();
}

void Pipeline::finish() { advance(true); }

RollbackOutcome Pipeline::rollback(int detect_cycle, std::optional<AnomalousRegion> aware_region) {
    const int r = std::max(0, detect_cycle - config_.c_lat - d_);
    const int b0 = r / c_bat_ * c_bat_;
    if (b0 < frontier_ && b0 < horizon_) {
        log_event(detect_cycle, "rollback_out_of_range", "target=" + std::to_string(b0));
        return RollbackOutcome::kOutOfRange;
    }
    for (std::size_t i = 0; i < register_.size(); ++i) {
        if (register_[i].consumed && register_[i].cycle >= b0) {
            log_event(detect_cycle, "abort", "entry=" + std::to_string(i));
            return RollbackOutcome::kAborted;
        }
    }
    int undone = 0;
    while (!batches_.empty() && batches_.back().start >= b0) {
        Batch &batch = batches_.back();
        for (auto op = batch.ops.rbegin(); op != batch.ops.rend(); ++op) {
            apply_op(*op);
        }
        for (const NodeRef &n : batch.consumed) {
            Layer &layer = layer_at(n.layer);
            auto pos = std::lower_bound(layer.active[n.species].begin(), layer.active[n.species].end(), n.ancilla);
            layer.consumed[n.species][pos - layer.active[n.species].begin()] = 0;
        }
        batches_.pop_back();
        ++undone;
    }
    frontier_ = std::min(frontier_, b0);
    next_instr_ = static_cast<std::size_t>(
        std::lower_bound(instructions_.begin(), instructions_.end(), frontier_,
                         [](const Instruction &ins, int c) { return ins.cycle < c; }) -
        instructions_.begin());
    for (RegisterEntry &e : register_) {
        if (e.cycle >= frontier_) {
            e.corrected = false;
            e.value = 0;
        }
    }
    if (aware_region) {
        region_ = std::move(aware_region);
        std::erase_if(decoders_, [](const auto &kv) { return std::get<1>(kv.first) >= 0; });
    }
    log_event(detect_cycle, "rollback",
              "target=" + std::to_string(b0) + ";batches=" + std::to_string(undone) + (region_ ? ";aware" : ""));
    advance(false);
    return RollbackOutcome::kApplied;
}

std::optional<ExpansionRequest> ExpansionQueue::request(int qubit, int d, int d_ano, int cycle, int hold_cycles) {
    if (qubit < 0) {
        return std::nullopt;
    }
    auto it = active_.find(qubit);
    if (it != active_.end()) {
        it->second.hold_until = std::max(it->second.hold_until, cycle + hold_cycles);
        return std::nullopt;
    }
    int d_exp = 2 * d;
    if (d_exp <= d + 2 * d_ano) {
        d_exp = d + 2 * d_ano + 1;
    }
    ExpansionRequest req{qubit, d_exp, cycle + hold_cycles};
    active_.emplace(qubit, req);
    return req;
}

std::vector<int> ExpansionQueue::release(int cycle) {
    std::vector<int> out;
    for (auto it = active_.begin(); it != active_.end();) {
        if (it->second.hold_until <= cycle) {
            out.push_back(it->first);
            it = active_.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

MemoryFootprint memory_footprint(int d, int c_win) {
    if (d <= 0 || c_win < 0) {
        throw std::invalid_argument("memory_footprint needs d > 0 and c_win >= 0");
    }
    const double plane = 2.0 * d * d;
    MemoryFootprint m;
    const double c_bat = std::round(std::sqrt(2.0 * c_win));
    m.syndrome_queue_bits = c_win == 0 ? 0.0 : plane * (c_win + c_bat);
    m.counter_bits = c_win <= 1 ? 0.0 : plane * std::log2(static_cast<double>(c_win));
    m.matching_queue_bits = plane * std::sqrt(c_win / 2.0);
    return m;
}

void write_event_log(std::ostream &out, const std::vector<PipelineEvent> &events) {
    out << "cycle,type,payload\n";
    for (const auto &e : events) {
        out << e.cycle << ',' << e.type << ',';
        if (e.payload.find_first_of(",\"\n") != std::string::npos) {
            out << '"';
            for (char c : e.payload) {
                if (c == '"') {
                    out << '"';
                }
                out << c;
            }
            out << '"';
        } else {
            out << e.payload;
        }
        out << '\n';
    }
}

}  // namespace q3de
