#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relexp/common/error.hpp"
#include "relexp/common/image.hpp"
#include "relexp/ilp/induction.hpp"
#include "relexp/percept/percept.hpp"
#include "relexp/surrogate/surrogate.hpp"

namespace relexp::pipeline {

// The instance to explain is not classified as the concept.
class BelowThresholdError : public Error {
 public:
  BelowThresholdError(double estimate, double theta);
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

enum class Polarity { positive, negative };

struct LogicalExample {
  std::string constant;  // e1, e2, ...
  Polarity polarity = Polarity::positive;
  std::vector<percept::AttributeAtom> attributes;
  std::vector<percept::RelationAtom> relations;
  double estimate = 0.0;
  std::optional<percept::RelationAtom> flipped;  // empty for the original
};

// Swaps the pixel content of two cells.
Image flip_in_image(const Image& image, const percept::SuperPixel& a, const percept::SuperPixel& b);

// Selection after flipping cells i and j: ids stay with their content, so
// i takes j's position and vice versa.
std::vector<percept::SuperPixel> swap_positions(std::span<const percept::SuperPixel> selection, int i,
                                                int j);

// R' by re-extracting every relation over the moved selection.
std::vector<percept::RelationAtom> relations_after_flip(std::span<const percept::SuperPixel> selection,
                                                        int i, int j);

// R' by patching R: atoms not touching i or j are kept, the others are
// recomputed from grid positions.
std::vector<percept::RelationAtom> patch_relations(std::span<const percept::RelationAtom> relations,
                                                   std::span<const percept::SuperPixel> selection, int i,
                                                   int j);

// One example per relation atom, preceded by the unperturbed one (e1).
std::vector<LogicalExample> perturb_relations(const Image& image, const surrogate::BatchPredictor& predict,
                                              std::span<const percept::SuperPixel> selection,
                                              std::span<const percept::AttributeAtom> attributes,
                                              std::span<const percept::RelationAtom> relations,
                                              double theta, double original_estimate);

// "sp26_e1": block constants are local to their example.
std::string block_constant(int id, std::string_view example);

ilp::Program to_program(std::span<const LogicalExample> examples);

struct ExplainConfig {
  int k = 3;
  double theta = 0.8;
  int n_samples = 1000;
  int lasso_k = 0;  // 0 means 2k
  std::uint64_t seed = 0;
  surrogate::SelectionMode selection = surrogate::SelectionMode::signed_weight;
  surrogate::PoolOptions pool;
  percept::AttributePool attributes;
  ilp::SearchConfig ilp;
  ilp::ModeSet modes = ilp::default_modes();

  int effective_lasso_k() const { return lasso_k > 0 ? lasso_k : 2 * k; }
  void validate() const;  // throws ConfigError
};

struct ExplanationRun {
  Image image;
  int k = 0;
  double theta = 0.0;
  double estimate = 0.0;
  std::vector<percept::SuperPixel> cells;  // full segmentation
  surrogate::SamplePool pool;
  surrogate::SurrogateFit fit;
  std::vector<int> selection;  // ids by descending weight
  std::vector<percept::AttributeAtom> attributes;
  std::vector<percept::RelationAtom> relations;
  std::vector<LogicalExample> examples;
  ilp::Program program;
  ilp::Theory theory;

  int positives() const;
  int negatives() const;
  // Selected cells in ascending id order.
  std::vector<percept::SuperPixel> selected_cells() const;
};

// Throws BelowThresholdError when f(image) < theta.
ExplanationRun explain(const Image& image, const surrogate::BatchPredictor& predict,
                       const ExplainConfig& config);

}  // namespace relexp::pipeline
