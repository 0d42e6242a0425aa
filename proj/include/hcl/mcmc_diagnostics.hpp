#pragma once

#include <vector>

namespace hcl {

/// Draws of one scalar parameter, one inner vector per chain (equal lengths).
using ChainDraws = std::vector<std::vector<double>>;

/// Split-chain potential scale reduction factor. NaN when the draws have no
/// within-chain variation.
double split_rhat(const ChainDraws& chains);

/// Effective sample size over all chains (split chains, Geyer's initial
/// monotone sequence on the combined autocorrelation estimate).
double effective_sample_size(const ChainDraws& chains);

}  // namespace hcl
