#include "relexp/pipeline/pipeline.hpp"

#include <algorithm>
#include <cstdio>

namespace relexp::pipeline {

using percept::RelationAtom;
using percept::SuperPixel;

namespace {

std::string format_estimate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const SuperPixel& find_cell(std::span<const SuperPixel> cells, int id) {
  auto it = std::find_if(cells.begin(), cells.end(), [&](const SuperPixel& s) { return s.id == id; });
  if (it == cells.end()) throw InvalidSelectionError("super-pixel " + std::to_string(id) + " not in selection");
  return *it;
}

}  // namespace

BelowThresholdError::BelowThresholdError(double estimate, double theta)
    : Error("instance not classified as concept (estimate " + format_estimate(estimate) +
            " below threshold " + format_estimate(theta) + ")"),
      estimate_(estimate) {}

Image flip_in_image(const Image& image, const SuperPixel& a, const SuperPixel& b) {
  if (a.id == b.id) throw InvalidSelectionError("cannot flip a super-pixel with itself");
  const int w = a.bounds.x1 - a.bounds.x0;
  const int h = a.bounds.y1 - a.bounds.y0;
  if (w != b.bounds.x1 - b.bounds.x0 || h != b.bounds.y1 - b.bounds.y0)
    throw InvalidSelectionError("super-pixels differ in size");
  Image out = image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set_pixel(a.bounds.x0 + x, a.bounds.y0 + y, image.pixel(b.bounds.x0 + x, b.bounds.y0 + y));
      out.set_pixel(b.bounds.x0 + x, b.bounds.y0 + y, image.pixel(a.bounds.x0 + x, a.bounds.y0 + y));
    }
  }
  return out;
}

std::vector<SuperPixel> swap_positions(std::span<const SuperPixel> selection, int i, int j) {
  const SuperPixel a = find_cell(selection, i);
  const SuperPixel b = find_cell(selection, j);
  std::vector<SuperPixel> out(selection.begin(), selection.end());
  auto move_to = [](SuperPixel& s, const SuperPixel& where) {
    s.col = where.col;
    s.row = where.row;
    s.bounds = where.bounds;
    s.center_x = where.center_x;
    s.center_y = where.center_y;
  };
  for (SuperPixel& s : out) {
    if (s.id == i) move_to(s, b);
    else if (s.id == j) move_to(s, a);
  }
  return out;
}

std::vector<RelationAtom> relations_after_flip(std::span<const SuperPixel> selection, int i, int j) {
  return percept::extract_relations(swap_positions(selection, i, j));
}

std::vector<RelationAtom> patch_relations(std::span<const RelationAtom> relations,
                                          std::span<const SuperPixel> selection, int i, int j) {
  const auto moved = swap_positions(selection, i, j);
  std::vector<RelationAtom> out;
  for (const RelationAtom& r : relations) {
    const bool touched = r.subject == i || r.subject == j || r.object == i || r.object == j;
    if (!touched) out.push_back(r);
  }
  for (const SuperPixel& a : moved) {
    for (const SuperPixel& b : moved) {
      if (a.id == b.id) continue;
      const bool touched = a.id == i || a.id == j || b.id == i || b.id == j;
      if (!touched) continue;
      for (percept::Relation rel : percept::kRelationPool)
        if (percept::holds(rel, a.col, a.row, b.col, b.row)) out.push_back({rel, a.id, b.id});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LogicalExample> perturb_relations(const Image& image, const surrogate::BatchPredictor& predict,
                                              std::span<const SuperPixel> selection,
                                              std::span<const percept::AttributeAtom> attributes,
                                              std::span<const RelationAtom> relations, double theta,
                                              double original_estimate) {
  if (relations.empty())
    throw InvalidSelectionError("no relations among the selected super-pixels; increase k");
  std::vector<LogicalExample> out;
  LogicalExample first;
  first.constant = "e1";
  first.attributes.assign(attributes.begin(), attributes.end());
  first.relations.assign(relations.begin(), relations.end());
  first.estimate = original_estimate;
  first.polarity = original_estimate >= theta ? Polarity::positive : Polarity::negative;
  out.push_back(std::move(first));

  std::vector<Image> flipped;
  flipped.reserve(relations.size());
  for (const RelationAtom& r : relations)
    flipped.push_back(flip_in_image(image, find_cell(selection, r.subject), find_cell(selection, r.object)));
  const std::vector<double> scores = predict(flipped);
  if (scores.size() != flipped.size()) throw Error("predictor returned a wrong number of scores");

  for (std::size_t n = 0; n < relations.size(); ++n) {
    const RelationAtom& r = relations[n];
    LogicalExample e;
    e.constant = "e" + std::to_string(n + 2);
    e.attributes.assign(attributes.begin(), attributes.end());
    e.relations = relations_after_flip(selection, r.subject, r.object);
    e.estimate = scores[n];
    e.polarity = scores[n] >= theta ? Polarity::positive : Polarity::negative;
    e.flipped = r;
    out.push_back(std::move(e));
  }
  return out;
}

std::string block_constant(int id, std::string_view example) {
  return percept::default_constant(id) + "_" + std::string(example);
}

ilp::Program to_program(std::span<const LogicalExample> examples) {
  using ilp::Atom;
  using ilp::Term;
  ilp::Program p;
  for (const LogicalExample& e : examples) {
    (e.polarity == Polarity::positive ? p.positives : p.negatives).push_back(e.constant);
    std::vector<int> blocks;
    for (const auto& a : e.attributes) blocks.push_back(a.subject);
    for (const auto& r : e.relations) {
      blocks.push_back(r.subject);
      blocks.push_back(r.object);
    }
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    auto c = [&](int id) { return Term::constant(block_constant(id, e.constant)); };
    for (int id : blocks) p.facts.push_back(Atom{"contains", {c(id), Term::constant(e.constant)}});
    for (const auto& a : e.attributes)
      p.facts.push_back(Atom{"has_color", {c(a.subject), Term::constant(std::string(color_name(a.value)))}});
    for (const auto& r : e.relations)
      p.facts.push_back(Atom{std::string(percept::relation_name(r.predicate)), {c(r.subject), c(r.object)}});
  }
  return p;
}

void ExplainConfig::validate() const {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  if (n_samples < 1) throw ConfigError("n-samples must be at least 1");
  if (lasso_k < 0) throw ConfigError("lasso K must be non-negative");
  if (effective_lasso_k() < k) throw ConfigError("lasso K must be at least k");
  ilp.validate();
}

int ExplanationRun::positives() const {
  return static_cast<int>(std::count_if(examples.begin(), examples.end(),
                                        [](const LogicalExample& e) { return e.polarity == Polarity::positive; }));
}

int ExplanationRun::negatives() const { return static_cast<int>(examples.size()) - positives(); }

std::vector<SuperPixel> ExplanationRun::selected_cells() const {
  std::vector<int> ids = selection;
  std::sort(ids.begin(), ids.end());
  std::vector<SuperPixel> out;
  for (int id : ids) out.push_back(find_cell(cells, id));
  return out;
}

ExplanationRun explain(const Image& image, const surrogate::BatchPredictor& predict,
                       const ExplainConfig& config) {
  config.validate();
  ExplanationRun run;
  run.image = image;
  run.k = config.k;
  run.theta = config.theta;
  run.cells = percept::segment(image);
  if (config.k > static_cast<int>(run.cells.size())) throw ConfigError("k exceeds the number of super-pixels");

  const Image single[] = {image};
  run.estimate = predict(single).at(0);
  if (run.estimate < config.theta) throw BelowThresholdError(run.estimate, config.theta);

  run.pool = surrogate::sample_pool(predict, image, run.cells, config.n_samples, config.seed, config.pool);
  run.fit = surrogate::fit_k_lasso(run.pool, config.effective_lasso_k());
  run.selection = surrogate::select_top_k(run.fit, config.k, config.selection);

  const auto selected = run.selected_cells();
  run.attributes = percept::extract_attributes(selected, config.attributes);
  run.relations = percept::extract_relations(selected);
  run.examples = perturb_relations(image, predict, selected, run.attributes, run.relations, config.theta,
                                   run.estimate);
  run.program = to_program(run.examples);
  run.theory = ilp::induce(run.program, config.modes, config.ilp);
  return run;
}

}  // namespace relexp::pipeline
