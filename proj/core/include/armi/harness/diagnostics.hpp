// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "armi/harness/config.hpp"
#include "armi/math/gradcheck.hpp"
#include "armi/model/model_spec.hpp"

namespace armi::harness {

// Tiny encoder used for gradient verification: d=8, 2 heads, ffn 16,
// sequence length 6, batch of 2 with one padded row. Depth is 2, or 7 for
// VHATT.
model::EncoderConfig gradcheck_encoder_config(const model::ModelSpec& spec, std::uint64_t seed);

// Builds the tiny model for `spec`, redraws its parameters from N(0, 0.2^2),
// draws random inputs, labels and class weights, and checks the gradient of the full training loss with respect to
// every parameter.
GradCheckReport check_architecture_gradients(const model::ModelSpec& spec, std::uint64_t seed,
                                             Task2Loss task2_loss = Task2Loss::kFocal,
                                             const GradCheckOptions& options = {});

}  // namespace armi::harness
