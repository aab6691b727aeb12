/* Copyright 2026 The krobust Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// layerstack-v1 files: a header line {"format","n_layers","dim"} followed by
// one {"id","label","layers"} record per line, layers being N arrays of M
// numbers. Values are widened to double on load.

#ifndef KROBUST_LAYERSTACK_HPP_
#define KROBUST_LAYERSTACK_HPP_

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "krobust/error.hpp"
#include "krobust/pooling.hpp"
#include "krobust/probe.hpp"

namespace krobust {

inline constexpr const char* kLayerstackFormat = "layerstack-v1";

struct LayerstackFile {
  std::size_t n_layers = 0;
  std::size_t dim = 0;
  std::vector<LabeledStack> records;
};

inline LayerstackFile read_layerstacks(std::istream& in) {
  LayerstackFile file;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      if (!have_header) {
        if (j.value("format", std::string()) != kLayerstackFormat) {
          throw ParseError(std::string("header must declare format \"") + kLayerstackFormat + "\"",
                           line_no);
        }
        file.n_layers = j.at("n_layers").get<std::size_t>();
        file.dim = j.at("dim").get<std::size_t>();
        if (file.n_layers == 0 || file.dim == 0) {
          throw ParseError("header dimensions must be positive", line_no);
        }
        have_header = true;
        continue;
      }
      LabeledStack rec;
      rec.id = j.at("id").get<std::string>();
      rec.label = j.at("label").get<int>();
      const auto& layers = j.at("layers");
      if (!layers.is_array() || layers.size() != file.n_layers) {
        throw ParseError("record " + rec.id + " does not have " + std::to_string(file.n_layers) +
                             " layers",
                         line_no);
      }
      std::vector<double> values;
      values.reserve(file.n_layers * file.dim);
      for (const auto& row : layers) {
        if (!row.is_array() || row.size() != file.dim) {
          throw ParseError("record " + rec.id + " has a layer of the wrong dimension", line_no);
        }
        for (const auto& v : row) {
          if (!v.is_number()) throw ParseError("non-numeric layer value", line_no);
          const double x = v.get<double>();
          if (!std::isfinite(x)) throw ParseError("non-finite layer value", line_no);
          values.push_back(x);
        }
      }
      rec.stack = LayerStack(file.n_layers, file.dim, std::move(values));
      if (!seen.insert(rec.id).second) {
        throw IntegrityError("line " + std::to_string(line_no) + ": duplicate id \"" + rec.id + "\"");
      }
      file.records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed layerstack record: ") + e.what(), line_no);
    }
  }
  if (!have_header) throw ParseError("layerstack file has no header", 0);
  return file;
}

inline LayerstackFile read_layerstacks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open layerstack file " + path);
  return read_layerstacks(in);
}

inline void write_layerstacks(std::ostream& out, const LayerstackFile& file) {
  nlohmann::ordered_json header;
  header["format"] = kLayerstackFormat;
  header["n_layers"] = file.n_layers;
  header["dim"] = file.dim;
  out << header.dump() << "\n";
  for (const auto& rec : file.records) {
    if (rec.stack.n_layers() != file.n_layers || rec.stack.dim() != file.dim) {
      throw ShapeError("record " + rec.id + " does not match the file header");
    }
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["label"] = rec.label;
    auto layers = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < file.n_layers; ++i) {
      const auto r = rec.stack.row(i);
      layers.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["layers"] = std::move(layers);
    out << j.dump() << "\n";
  }
}

}  // namespace krobust

#endif  // KROBUST_LAYERSTACK_HPP_
