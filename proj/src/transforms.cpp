#include "mmhar/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mmhar/rng.hpp"

namespace mmhar {

DatasetIndex subset_by_ratio(const DatasetIndex& index, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("subset_by_ratio: ratio must be in (0, 1]");
  if (ratio == 1.0) return index;

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < index.samples.size(); ++i) {
    by_class[index.samples[i].class_id].push_back(i);
  }

  std::vector<bool> keep(index.samples.size(), false);
  for (auto& [class_id, positions] : by_class) {
    const auto want = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(positions.size()))));
    Rng rng(derive_seed(seed, "subset/class_" + std::to_string(class_id)));
    rng.shuffle(positions);
    for (std::size_t k = 0; k < want && k < positions.size(); ++k) keep[positions[k]] = true;
  }

  DatasetIndex out;
  out.num_classes = index.num_classes;
  out.class_names = index.class_names;
  out.split = index.split;
  for (std::size_t i = 0; i < index.samples.size(); ++i) {
    if (keep[i]) out.samples.push_back(index.samples[i]);
  }
  return out;
}

DatasetIndex mask_classes(const DatasetIndex& index, Modality modality,
                          const std::set<int>& hidden_classes, MaskAudit* audit) {
  for (int c : hidden_classes) {
    if (c < 0 || c >= index.num_classes) {
      throw Error("mask_classes: hidden class " + std::to_string(c) + " outside [0, " +
                  std::to_string(index.num_classes) + ")");
    }
  }
  DatasetIndex out = index;
  if (audit) {
    audit->modality = modality;
    audit->hidden_classes = hidden_classes;
    audit->affected_sample_ids.clear();
  }
  for (auto& s : out.samples) {
    if (hidden_classes.count(s.class_id)) {
      s.modality_mask.remove(modality);
      if (audit) audit->affected_sample_ids.push_back(s.sample_id);
    }
  }
  return out;
}

}  // namespace mmhar
