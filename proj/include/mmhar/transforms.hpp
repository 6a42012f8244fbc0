#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "mmhar/data_types.hpp"

namespace mmhar {

/// Per-class stratified subset of floor(ratio * class_count) samples, at
/// least 1 per class, deterministic per seed. ratio must lie in (0, 1].
DatasetIndex subset_by_ratio(const DatasetIndex& index, double ratio, std::uint64_t seed);

struct MaskAudit {
  Modality modality = Modality::kImu;
  std::set<int> hidden_classes;
  std::vector<std::string> affected_sample_ids;
};

/// Removes `modality` from the modality_mask of every sample whose class is
/// in hidden_classes. No sample is deleted; the audit lists affected ids.
DatasetIndex mask_classes(const DatasetIndex& index, Modality modality,
                          const std::set<int>& hidden_classes, MaskAudit* audit = nullptr);

}  // namespace mmhar
