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

#include "q3de/csv.h"

#include <cstdio>
#include <stdexcept>

namespace q3de {

std::string csv_escape(const std::string &field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string &line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

CsvFile::CsvFile(std::string path) : path_(std::move(path)), partial_(path_ + ".partial") {
    out_.open(partial_, std::ios::out | std::ios::trunc);
    if (!out_) {
        throw std::runtime_error("cannot open " + partial_ + " for writing");
    }
    out_.precision(12);
}

CsvFile::~CsvFile() {
    if (!committed_ && out_.is_open()) {
        out_.close();
    }
}

void CsvFile::row(const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
    out_.flush();
}

void CsvFile::commit() {
    out_.close();
    if (!out_) {
        throw std::runtime_error("error writing " + partial_);
    }
    if (std::rename(partial_.c_str(), path_.c_str()) != 0) {
        throw std::runtime_error("cannot rename " + partial_ + " to " + path_);
    }
    committed_ = true;
}

void CsvFile::discard() {
    out_.close();
    std::remove(partial_.c_str());
    committed_ = true;
}

}  // namespace q3de
