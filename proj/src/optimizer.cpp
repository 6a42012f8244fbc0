#include "mmhar/optimizer.hpp"

#include <cmath>

namespace mmhar {

void optimizer_step(ModelParams& params, const ModelParams& grads, AdamWState& state,
                    const OptimizerHyper& hyper) {
  for (const auto& gname : grads.group_order) {
    if (!params.has_group(gname)) {
      throw ContractError("optimizer: gradients reference unknown group '" + gname + "'");
    }
    if (!params.group(gname).trainable) {
      throw ContractError("optimizer: gradients supplied for frozen group '" + gname + "'");
    }
  }

  state.step += 1;
  const double bias1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));

  for (const auto& gname : grads.group_order) {
    const ParamGroup& gsrc = grads.group(gname);
    ParamGroup& target = params.group(gname);
    for (const auto& pname : gsrc.order) {
      const Tensor& grad = gsrc.at(pname);
      Tensor& value = target.at(pname);
      if (grad.shape() != value.shape()) {
        throw ContractError("optimizer: gradient shape " + grad.shape_string() + " for '" +
                            gname + "/" + pname + "' does not match parameter " +
                            value.shape_string());
      }
      if (!grad.all_finite()) {
        throw TrainError("optimizer: non-finite gradient in '" + gname + "/" + pname + "'");
      }

      auto& slot = state.moments[gname][pname];
      if (slot.first.numel() != grad.numel()) {
        slot.first = Tensor::zeros(grad.shape());
        slot.second = Tensor::zeros(grad.shape());
      }
      Tensor& m = slot.first;
      Tensor& v = slot.second;

      for (std::int64_t i = 0; i < grad.numel(); ++i) {
        const double g = grad[i];
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
        v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        value[i] -= hyper.learning_rate *
                    (m_hat / (std::sqrt(v_hat) + hyper.eps) + hyper.weight_decay * value[i]);
      }
    }
  }
}

}  // namespace mmhar
