#pragma once

#include <cstdint>
#include <vector>

#include "adl/coverage_sim.hpp"
#include "adl/task.hpp"

namespace adl {

// Grid-part domain: random rectilinear parts (connected blobs of cells,
// 1 cell = 1 cm) grouped into shape families; each instance of a family
// is a size/position-perturbed rendering of the family's base shape, as
// seen through a loose bounding-box crop. 66-D features.
std::vector<Task> generate_grid_part_tasks(int count, uint64_t seed, int shape_family_count,
                                           const CostVector& costs = CostVector{});

// Block-insertion domain: each task is (environment id, slot position in
// a 20x20 cm workspace, slot-estimate noise sigma = 0.3 cm); features are
// a one-hot environment code, the slot coordinates and sigma. Tasks also
// carry an internal occupancy rendering (environment walls plus the slot
// block) so the coverage simulation can label transfer between them; the
// rendering is not part of the serialized block-task schema.
std::vector<Task> generate_block_tasks(int count, uint64_t seed, int env_count,
                                       const CostVector& costs = CostVector{});

// Teaches the robot k skills on distinct uniformly sampled tasks. The
// sample order is a seeded permutation, so the k-skill library's
// provenance is a prefix of the (k+1)-skill library's under the same
// seed. Tasks whose skill learning fails are skipped and resampled, up
// to retry_limit failures.
SkillLibrary pretrain_library(const std::vector<Task>& tasks, int k, uint64_t seed,
                              const SimConfig& sim, int retry_limit = 10);

}  // namespace adl
