#pragma once

#include <algorithm>
#include <vector>

#include "owf/error.hpp"

namespace owf {

/// Tangent line ell >= slope * s + intercept to s -> s^2.
template <typename Scalar>
struct LossCut {
  Scalar slope;
  Scalar intercept;
};

/// K+1 tangents of s^2 at s_k = k * capacity / K. The envelope under-estimates
/// s^2 on [0, capacity] by at most (capacity / K)^2 / 4.
template <typename Scalar>
std::vector<LossCut<Scalar>> pwl_loss_cuts(Scalar capacity, int segments) {
  if (!(capacity > Scalar(0))) throw InvalidArgument("pwl capacity must be positive");
  if (segments < 1) throw InvalidArgument("pwl segment count must be >= 1");
  std::vector<LossCut<Scalar>> cuts;
  cuts.reserve(static_cast<std::size_t>(segments) + 1);
  for (int k = 0; k <= segments; ++k) {
    const Scalar s = capacity * Scalar(k) / Scalar(segments);
    cuts.push_back({Scalar(2) * s, -s * s});
  }
  return cuts;
}

template <typename Scalar>
Scalar tangent_envelope(const std::vector<LossCut<Scalar>>& cuts, Scalar s) {
  Scalar best = cuts.front().slope * s + cuts.front().intercept;
  for (const auto& c : cuts) best = std::max(best, c.slope * s + c.intercept);
  return best;
}

template <typename Scalar>
Scalar pwl_max_gap(Scalar capacity, int segments) {
  const Scalar h = capacity / Scalar(segments);
  return h * h / Scalar(4);
}

/// The same envelope as consecutive linear pieces: piece k has slope 2 s_k and
/// spans between the neighbouring tangent intersections (s_{k-1}+s_k)/2 and (s_k+s_{k+1})/2.
template <typename Scalar>
struct LossPiece {
  Scalar width;
  Scalar slope;
};

template <typename Scalar>
std::vector<LossPiece<Scalar>> envelope_pieces(Scalar capacity, int segments) {
  const auto cuts = pwl_loss_cuts(capacity, segments);
  const Scalar h = capacity / Scalar(segments);
  std::vector<LossPiece<Scalar>> pieces;
  pieces.reserve(cuts.size());
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const bool edge = k == 0 || k + 1 == cuts.size();
    pieces.push_back({edge ? h / Scalar(2) : h, cuts[k].slope});
  }
  return pieces;
}

}  // namespace owf
