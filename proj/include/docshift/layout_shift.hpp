// Copyright 2026 The docshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOCSHIFT_LAYOUT_SHIFT_HPP_
#define DOCSHIFT_LAYOUT_SHIFT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "docshift/box.hpp"
#include "docshift/document.hpp"
#include "docshift/image.hpp"
#include "docshift/oracle.hpp"
#include "docshift/rng.hpp"

namespace docshift {

// Horizontal (lambda1) and vertical (lambda2) dilation in pixels.
struct MergeParams {
  int lambda1 = 0;
  int lambda2 = 0;
};

struct MergeResult {
  std::vector<BoundingBox> merged_boxes;
  // assignment[i] is the merged box holding input box i.
  std::vector<std::size_t> assignment;
};

// Groups boxes whose dilated extents overlap. Each box is dilated by
// (lambda1, lambda2) on every side and tested against the groups seen so
// far; every group it touches collapses into one, and a group whose grown
// extent now touches another group absorbs that one too. Output extents are
// unions of the undilated member boxes, ordered by smallest member index.
// The grouping is independent of input order and stable under re-merging.
MergeResult merge_boxes(std::span<const BoundingBox> boxes, MergeParams params);

struct MergeOutcome {
  Document document;
  std::size_t groups = 0;
};

// Replaces every word box with the merged box of its group. Entity boxes
// are recomputed from the new word boxes; text and labels are untouched.
MergeOutcome apply_layout_merge(const Document& doc, MergeParams params);

struct StrengthScore {
  int entity_id = 0;
  int trials = 0;
  int unchanged = 0;

  double strength() const {
    return trials > 0 ? static_cast<double>(unchanged) / trials : 0.0;
  }
  friend bool operator==(const StrengthScore&, const StrengthScore&) = default;
};

constexpr int kDefaultStrengthTrials = 30;
constexpr double kDefaultStrengthThreshold = 1.0;

// Moves every entity onto the box position of pi(entity) for a random
// permutation pi. Words keep their offsets within the entity and are
// clamped to the page.
Document shuffle_entity_boxes(const Document& doc, Rng& rng);

// Counts, per entity, how many of `trials` shuffled layouts leave the
// oracle's labels for all of the entity's words equal to its labels on the
// untouched page. Entities without words never count as unchanged.
std::vector<StrengthScore> score_semantic_strength(const Document& doc,
                                                   PredictionOracle& oracle,
                                                   int trials,
                                                   std::uint64_t seed);

// Stand-in when no oracle is configured: question/answer entities with at
// least two words containing letters score 1, everything else 0.
std::vector<StrengthScore> heuristic_strength(const Document& doc);

constexpr int kMoveGridStride = 8;

// Picks a grid-aligned position for a box of the entity's size that stays on
// the page and overlaps no word or entity box. Throws PlacementError.
BoundingBox select_move_target(const Document& doc, const Entity& entity, Rng& rng);

// Per-channel median of the one-pixel page border.
std::vector<std::uint8_t> estimate_background(const Image& image);

struct MoveRecord {
  int entity_id = 0;
  BoundingBox old_box;
  BoundingBox new_box;
};

struct MoveOutcome {
  Document document;
  Image image;
  std::vector<MoveRecord> moves;
  // Entities that qualified but had nowhere to go.
  std::vector<int> unplaced;
};

// Moves up to `count` entities with strength >= threshold (picked in random
// order) to free page regions, copying their pixels and filling the vacated
// area with the estimated background.
MoveOutcome apply_layout_move(const Document& doc, const Image& image,
                              std::span<const StrengthScore> strengths,
                              double threshold, int count, Rng& rng);

}  // namespace docshift

#endif  // DOCSHIFT_LAYOUT_SHIFT_HPP_
