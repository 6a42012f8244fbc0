#pragma once

#include "mmhar/data_types.hpp"
#include "mmhar/synthetic.hpp"

namespace mmhar::testing {

enum class OracleModality { kSensorOnly, kVideoOnly, kBimodal };

/// Independent nearest-template classifier over the synthetic benchmark:
/// squared distance to each class's noise-free template(s), argmin wins.
/// Returns expected top-1 accuracy under uniform tie-breaking: a sample
/// whose true class sits in an argmin set of size m contributes 1/m.
double nearest_template_accuracy(const SyntheticSpec& spec, const DatasetIndex& index,
                                 OracleModality modality);

}  // namespace mmhar::testing
