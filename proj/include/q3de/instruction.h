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

#ifndef Q3DE_INSTRUCTION_H
#define Q3DE_INSTRUCTION_H

#include <cstdint>
#include <string>
#include <vector>

namespace q3de {

enum class Opcode : std::uint8_t { kInitZero, kInitA, kInitY, kOpH, kMeasZ, kMeasZZ, kRead, kOpExpand };

std::string opcode_name(Opcode op);

struct Instruction {
    Opcode op = Opcode::kInitZero;
    std::vector<int> operands;
    /// Issue cycle.
    int cycle = 0;
    /// Raw outcome for kMeasZ.
    std::uint8_t raw_bit = 0;
    /// Register entry index for kRead.
    int entry = -1;
};

/// Whether the opcode occupies blocks of the qubit plane.
inline bool uses_plane(Opcode op) { return op != Opcode::kRead; }

}  // namespace q3de

#endif  // Q3DE_INSTRUCTION_H
