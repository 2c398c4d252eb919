#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minsurf/complex_structure.hpp"
#include "minsurf/immersion.hpp"
#include "minsurf/stability.hpp"

namespace minsurf {

// Named scalars in insertion order.
class MetricTable {
 public:
  void set(const std::string& name, double value);
  bool has(const std::string& name) const;
  double get(const std::string& name) const;
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Per-node columns for CSV export; rows run over the grid with i fastest.
struct FieldTable {
  ChartDomain domain;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(const std::string& name, const GridField<double>& field);
};

enum class JNSource { search, catalog };

struct AnalysisOptions {
  JNSource jn_source = JNSource::search;
  double metric_tol = kMetricTol;
  int random_directions = 12;
  std::uint64_t seed = 20240611;
  HolonomyOptions holonomy;
  SpectrumOptions spectrum;
  int random_sections = 20;
};

struct ResolutionAnalysis {
  int resolution = 0;
  double h = 0.0;
  MetricTable metrics;
  std::vector<std::pair<std::string, std::string>> labels;
  FieldTable fields;
};

// The identity suite on one grid.
ResolutionAnalysis analyze_resolution(const ImmersionPatch& patch, int resolution, const AnalysisOptions& options);
// The spectral suite on one grid.
ResolutionAnalysis spectrum_resolution(const ImmersionPatch& patch, int resolution, const AnalysisOptions& options);

// Normal complex structure chosen for a patch: holonomy search oriented like the catalog
// hint, or the catalog hint itself.
struct ChosenJN {
  std::optional<GridField<Mat>> J;
  HolonomyResult holonomy;  // empty for the catalog source
  bool flipped = false;
  double hint_distance = 0.0;  // max |J - hint| over the grid
};
ChosenJN choose_JN(const ImmersionPatch& patch, const FramePackage& frames, const NormalTensorField& A,
                   const AnalysisOptions& options);

}  // namespace minsurf
