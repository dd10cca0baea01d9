/*
 Copyright 2026 The tpfc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <string>
#include <vector>

namespace tpfc
{

  struct Series
  {
    std::string label;
    std::vector<double> x, y;
  };

  enum class PlotKind
  {
    Line,
    Bars
  };

  /// Writes a fixed-viewport SVG chart. Output is byte-deterministic for
  /// identical inputs (no timestamps, locale-independent number formatting),
  /// so figures can be diffed. Throws on empty input or I/O failure.
  void emit_plot(const std::string &path, const std::string &title,
                 const std::string &xlabel, const std::string &ylabel,
                 const std::vector<Series> &series, PlotKind kind);

} // namespace tpfc
