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

#ifndef Q3DE_CSV_H
#define Q3DE_CSV_H

#include <fstream>
#include <string>
#include <vector>

namespace q3de {

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_escape(const std::string &field);

/// Splits one CSV line, honoring quoted fields.
std::vector<std::string> csv_split(const std::string &line);

/// CSV output written to "<path>.partial" and renamed into place by
/// commit(). Every finished row is flushed, so an interrupted run leaves
/// the completed grid points behind.
class CsvFile {
   public:
    explicit CsvFile(std::string path);
    ~CsvFile();
    CsvFile(const CsvFile &) = delete;
    CsvFile &operator=(const CsvFile &) = delete;

    std::ostream &stream() { return out_; }
    void row(const std::vector<std::string> &fields);
    /// Flushes after a row written straight to stream().
    void end_row() { out_.flush(); }
    void commit();
    /// Closes and deletes the partial file.
    void discard();
    const std::string &path() const { return path_; }

   private:
    std::string path_;
    std::string partial_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace q3de

#endif  // Q3DE_CSV_H
