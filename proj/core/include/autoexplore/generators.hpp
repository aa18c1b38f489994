#pragma once

#include <cstdint>

#include "autoexplore/mdp.hpp"

namespace autoexplore {

/// Random MDP: each (s, a) moves to `branching` distinct uniformly chosen
/// successors with Dirichlet(1) masses; costs uniform on [0, 1].
TabularMdp gen_garnet(int n_states, int n_actions, int branching, std::uint64_t seed, double gamma);

/**
 * Chain of length n with actions 0 = left, 1 = right. Right advances with
 * probability 1 - slip and otherwise falls back one state; left always falls
 * back. State 0 costs 0.8, the far end costs 0, every other state costs 1.
 */
TabularMdp gen_hard_chain(int n_states, double slip, double gamma);

}  // namespace autoexplore
