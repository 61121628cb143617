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

#include "docshift/layout_shift.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "docshift/errors.hpp"

namespace docshift {
namespace {

struct Group {
  BoundingBox hull;
  std::size_t first = 0;
  std::vector<std::size_t> members;
  bool alive = true;
};

bool near(const BoundingBox& a, const BoundingBox& b, const MergeParams& p) {
  return a.dilated(p.lambda1, p.lambda2).intersects(b.dilated(p.lambda1, p.lambda2));
}

// Offsets of each entity's first word in word_refs() order.
std::vector<std::size_t> word_offsets(const Document& doc) {
  std::vector<std::size_t> offsets;
  offsets.reserve(doc.entities.size() + 1);
  std::size_t n = 0;
  for (const auto& e : doc.entities) {
    offsets.push_back(n);
    n += e.words.size();
  }
  offsets.push_back(n);
  return offsets;
}

void refit_entity_box(Entity& e) {
  if (e.words.empty()) return;
  BoundingBox hull = e.words.front().box;
  for (const auto& w : e.words) hull = hull.united(w.box);
  e.box = hull;
}

}  // namespace

MergeResult merge_boxes(std::span<const BoundingBox> boxes, MergeParams params) {
  if (params.lambda1 < 0 || params.lambda2 < 0) {
    throw ParameterError("merge dilation must be non-negative, got (" +
                         std::to_string(params.lambda1) + ", " +
                         std::to_string(params.lambda2) + ")");
  }
  std::vector<Group> groups;
  groups.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].valid()) {
      throw ValidationError("merge_boxes: box " + std::to_string(i) + " is invalid");
    }
    Group current{boxes[i], i, {i}, true};
    // Absorb until the grown hull touches no other live group.
    bool absorbed = true;
    while (absorbed) {
      absorbed = false;
      for (auto& g : groups) {
        if (!g.alive || !near(current.hull, g.hull, params)) continue;
        current.hull = current.hull.united(g.hull);
        current.first = std::min(current.first, g.first);
        current.members.insert(current.members.end(), g.members.begin(),
                               g.members.end());
        g.alive = false;
        absorbed = true;
      }
    }
    groups.push_back(std::move(current));
  }

  std::vector<const Group*> live;
  for (const auto& g : groups) {
    if (g.alive) live.push_back(&g);
  }
  std::sort(live.begin(), live.end(),
            [](const Group* a, const Group* b) { return a->first < b->first; });

  MergeResult result;
  result.assignment.assign(boxes.size(), 0);
  for (std::size_t k = 0; k < live.size(); ++k) {
    result.merged_boxes.push_back(live[k]->hull);
    for (std::size_t m : live[k]->members) result.assignment[m] = k;
  }
  return result;
}

MergeOutcome apply_layout_merge(const Document& doc, MergeParams params) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(doc.word_count());
  for (const auto& e : doc.entities) {
    for (const auto& w : e.words) boxes.push_back(w.box);
  }
  const MergeResult merged = merge_boxes(boxes, params);

  MergeOutcome out{doc, merged.merged_boxes.size()};
  std::size_t i = 0;
  for (auto& e : out.document.entities) {
    for (auto& w : e.words) w.box = merged.merged_boxes[merged.assignment[i++]];
    refit_entity_box(e);
  }
  return out;
}

Document shuffle_entity_boxes(const Document& doc, Rng& rng) {
  std::vector<std::size_t> perm(doc.entities.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));

  Document out = doc;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const BoundingBox& from = doc.entities[i].box;
    const BoundingBox& to = doc.entities[perm[i]].box;
    const int dx = to.x1 - from.x1;
    const int dy = to.y1 - from.y1;
    Entity& e = out.entities[i];
    for (auto& w : e.words) {
      w.box = w.box.translated(dx, dy).clamped(doc.width, doc.height);
    }
    if (e.words.empty()) {
      e.box = e.box.translated(dx, dy).clamped(doc.width, doc.height);
    } else {
      refit_entity_box(e);
    }
  }
  return out;
}

std::vector<StrengthScore> score_semantic_strength(const Document& doc,
                                                   PredictionOracle& oracle,
                                                   int trials,
                                                   std::uint64_t seed) {
  if (trials < 1) {
    throw ParameterError("semantic strength needs at least one trial, got " +
                         std::to_string(trials));
  }
  const std::size_t n_words = doc.word_count();
  auto query = [&](const Document& page, long trial) {
    std::vector<std::string> labels;
    try {
      labels = oracle.predict(page);
    } catch (const OracleError& e) {
      throw OracleError(std::string("prediction oracle failed on trial: ") + e.what(),
                        trial);
    }
    if (labels.size() != n_words) {
      throw OracleError("prediction oracle returned " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(n_words) + " words",
                        trial);
    }
    return labels;
  };

  // Trial 0 is the untouched page.
  const auto reference = query(doc, 0);
  const auto offsets = word_offsets(doc);

  std::vector<StrengthScore> scores;
  scores.reserve(doc.entities.size());
  for (const auto& e : doc.entities) scores.push_back({e.id, trials, 0});

  Rng rng(seed);
  for (int t = 1; t <= trials; ++t) {
    const auto labels = query(shuffle_entity_boxes(doc, rng), t);
    for (std::size_t e = 0; e < doc.entities.size(); ++e) {
      if (offsets[e] == offsets[e + 1]) continue;
      const bool same = std::equal(labels.begin() + offsets[e],
                                   labels.begin() + offsets[e + 1],
                                   reference.begin() + offsets[e]);
      if (same) ++scores[e].unchanged;
    }
  }
  return scores;
}

std::vector<StrengthScore> heuristic_strength(const Document& doc) {
  std::vector<StrengthScore> scores;
  for (const auto& e : doc.entities) {
    int alphabetic = 0;
    for (const auto& w : e.words) {
      if (std::any_of(w.text.begin(), w.text.end(),
                      [](unsigned char c) { return std::isalpha(c); })) {
        ++alphabetic;
      }
    }
    const bool strong = e.label &&
                        (*e.label == Label::kQuestion || *e.label == Label::kAnswer) &&
                        alphabetic >= 2;
    scores.push_back({e.id, 1, strong ? 1 : 0});
  }
  return scores;
}

BoundingBox select_move_target(const Document& doc, const Entity& entity, Rng& rng) {
  const int w = entity.box.width();
  const int h = entity.box.height();
  if (w <= 0 || h <= 0) {
    throw PlacementError("entity " + std::to_string(entity.id) + " has an empty box");
  }
  std::vector<BoundingBox> blockers;
  for (const auto& e : doc.entities) {
    if (!e.box.empty()) blockers.push_back(e.box);
    for (const auto& word : e.words) blockers.push_back(word.box);
  }

  std::vector<BoundingBox> candidates;
  for (int y = 0; y + h <= doc.height; y += kMoveGridStride) {
    for (int x = 0; x + w <= doc.width; x += kMoveGridStride) {
      const BoundingBox c{x, y, x + w, y + h};
      const bool free = std::none_of(blockers.begin(), blockers.end(),
                                     [&](const BoundingBox& b) { return b.intersects(c); });
      if (free) candidates.push_back(c);
    }
  }
  if (candidates.empty()) {
    throw PlacementError("no free " + std::to_string(w) + "x" + std::to_string(h) +
                         " region for entity " + std::to_string(entity.id));
  }
  return candidates[rng.below(candidates.size())];
}

std::vector<std::uint8_t> estimate_background(const Image& image) {
  std::vector<std::uint8_t> color(image.channels, 255);
  if (image.width == 0 || image.height == 0) return color;
  for (int c = 0; c < image.channels; ++c) {
    std::vector<std::uint8_t> border;
    for (int x = 0; x < image.width; ++x) {
      border.push_back(image.at(x, 0, c));
      if (image.height > 1) border.push_back(image.at(x, image.height - 1, c));
    }
    for (int y = 1; y + 1 < image.height; ++y) {
      border.push_back(image.at(0, y, c));
      if (image.width > 1) border.push_back(image.at(image.width - 1, y, c));
    }
    // Lower median for even counts.
    auto mid = border.begin() + static_cast<std::ptrdiff_t>((border.size() - 1) / 2);
    std::nth_element(border.begin(), mid, border.end());
    color[c] = *mid;
  }
  return color;
}

MoveOutcome apply_layout_move(const Document& doc, const Image& image,
                              std::span<const StrengthScore> strengths,
                              double threshold, int count, Rng& rng) {
  if (image.width != doc.width || image.height != doc.height) {
    throw ValidationError("document '" + doc.id + "': image is " +
                          std::to_string(image.width) + "x" +
                          std::to_string(image.height) + ", annotation says " +
                          std::to_string(doc.width) + "x" + std::to_string(doc.height));
  }
  MoveOutcome out{doc, image, {}, {}};
  if (count <= 0) return out;

  std::map<int, double> strength_of;
  for (const auto& s : strengths) strength_of[s.entity_id] = s.strength();

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const Entity& e = doc.entities[i];
    auto it = strength_of.find(e.id);
    if (it == strength_of.end() || it->second < threshold) continue;
    if (e.words.empty() || e.box.empty()) continue;
    candidates.push_back(i);
  }
  rng.shuffle(std::span<std::size_t>(candidates));

  const auto background = estimate_background(image);
  Image& img = out.image;
  for (std::size_t idx : candidates) {
    if (static_cast<int>(out.moves.size()) >= count) break;
    Entity& e = out.document.entities[idx];
    BoundingBox target;
    try {
      target = select_move_target(out.document, e, rng);
    } catch (const PlacementError&) {
      out.unplaced.push_back(e.id);
      continue;
    }
    const BoundingBox source = e.box;
    std::vector<std::uint8_t> patch;
    patch.reserve(static_cast<std::size_t>(source.area()) * img.channels);
    for (int y = source.y1; y < source.y2; ++y) {
      for (int x = source.x1; x < source.x2; ++x) {
        for (int c = 0; c < img.channels; ++c) {
          patch.push_back(img.at(x, y, c));
          img.at(x, y, c) = background[c];
        }
      }
    }
    std::size_t p = 0;
    for (int y = target.y1; y < target.y2; ++y) {
      for (int x = target.x1; x < target.x2; ++x) {
        for (int c = 0; c < img.channels; ++c) img.at(x, y, c) = patch[p++];
      }
    }
    const int dx = target.x1 - source.x1;
    const int dy = target.y1 - source.y1;
    for (auto& w : e.words) w.box = w.box.translated(dx, dy);
    e.box = target;
    out.moves.push_back({e.id, source, target});
  }
  return out;
}

}  // namespace docshift
